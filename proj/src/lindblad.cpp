#include "gcsieve/lindblad.hpp"

#include <cmath>

namespace gcsieve {

bool LindbladModel::is_unital(double tol) const {
  CMatrix s = CMatrix::Zero(dim(), dim());
  double scale = 0.0;
  for (const auto& l : lindblads) {
    s += commutator(l, l.adjoint());
    scale += l.squaredNorm();
  }
  return s.norm() <= tol * std::max(scale, 1.0);
}

LindbladModel make_model(CMatrix hamiltonian, std::vector<CMatrix> lindblads,
                         std::vector<std::string> labels, bool certify_wcl) {
  require_hermitian(hamiltonian, "LindbladModel hamiltonian");
  if (lindblads.empty()) throw Error("LindbladModel: at least one Lindblad operator is required");
  for (const auto& l : lindblads) {
    require_square(l, "LindbladModel lindblad");
    if (l.rows() != hamiltonian.rows()) throw DimensionError("LindbladModel: dimension mismatch");
  }
  if (labels.empty())
    for (std::size_t k = 0; k < lindblads.size(); ++k) labels.push_back("L" + std::to_string(k));
  if (labels.size() != lindblads.size()) throw Error("LindbladModel: label count mismatch");
  LindbladModel m{0.5 * (hamiltonian + hamiltonian.adjoint()), std::move(lindblads), std::move(labels), {}};
  if (certify_wcl) {
    m.wcl = wcl_check(m.hamiltonian, m.lindblads);
    if (!m.wcl->all_passed()) throw Error("LindbladModel: weak-coupling certificate failed");
  }
  return m;
}

CMatrix dissipator(const LindbladModel& model, const DensityMatrix& rho) {
  if (rho.dim() != model.dim()) throw DimensionError("dissipator: dimension mismatch");
  const CMatrix& r = rho.matrix();
  CMatrix out = CMatrix::Zero(r.rows(), r.cols());
  for (const auto& l : model.lindblads) {
    const CMatrix ldl = l.adjoint() * l;
    out += l * r * l.adjoint() - 0.5 * (ldl * r + r * ldl);
  }
  return out;
}

CMatrix liouvillian(const LindbladModel& model) {
  const Eigen::Index d = model.dim();
  const CMatrix id = identity(d);
  CMatrix gen = -kI * (kron(id, model.hamiltonian) - kron(model.hamiltonian.transpose(), id));
  for (const auto& l : model.lindblads) {
    const CMatrix ldl = l.adjoint() * l;
    gen += kron(l.conjugate(), l) - 0.5 * kron(id, ldl) - 0.5 * kron(ldl.transpose(), id);
  }
  return gen;
}

Propagator::Propagator(const LindbladModel& model) : dim_(model.dim()), generator_(liouvillian(model)) {}

CMatrix Propagator::step_map(double t) const { return mat_exp(t * generator_); }

const CMatrix& Propagator::cached_step(double dt) {
  for (const auto& [t, m] : cache_)
    if (std::abs(t - dt) <= 1e-14 * std::max(1.0, std::abs(dt))) return m;
  cache_.emplace_back(dt, step_map(dt));
  return cache_.back().second;
}

std::vector<DensityMatrix> Propagator::evolve(const DensityMatrix& rho0, const std::vector<double>& times) {
  if (rho0.dim() != dim_) throw DimensionError("evolve: dimension mismatch");
  std::vector<DensityMatrix> out;
  out.reserve(times.size());
  double t_prev = 0.0;
  CMatrix rho = rho0.matrix();
  for (const double t : times) {
    if (t < 0.0) throw Error("evolve: negative time");
    if (t < t_prev) throw Error("evolve: times must be ascending");
    if (t > t_prev) {
      const CVector v = cached_step(t - t_prev) * rho.reshaped();
      rho = v.reshaped(dim_, dim_);
      rho = 0.5 * (rho + rho.adjoint()).eval();
      t_prev = t;
    }
    out.emplace_back(rho);
  }
  return out;
}

std::vector<DensityMatrix> evolve(const LindbladModel& model, const DensityMatrix& rho0,
                                  const std::vector<double>& times) {
  Propagator p(model);
  return p.evolve(rho0, times);
}

double purity_rate(const PureState& state, const LindbladModel& model) {
  if (state.dim() != model.dim()) throw DimensionError("purity_rate: dimension mismatch");
  double total = 0.0;
  for (const auto& l : model.lindblads) total += quasivariance(state, l);
  return 2.0 * total;
}

double average_purity_loss(const PureState& state, const LindbladModel& model, double tau, int n_steps) {
  if (!(tau > 0.0)) throw Error("average_purity_loss: tau must be positive");
  if (n_steps < 1) throw Error("average_purity_loss: n_steps must be positive");
  std::vector<double> times;
  for (int k = 1; k <= n_steps; ++k) times.push_back(tau * k / n_steps);
  const auto traj = evolve(model, DensityMatrix::from_pure(state), times);
  const double pi0 = 1.0 - DensityMatrix::from_pure(state).purity();
  const double pit = 1.0 - traj.back().purity();
  return (pit - pi0) / tau;
}

std::vector<CMatrix> first_order_lindblad_t(const LindbladModel& model, double t) {
  const CMatrix u = mat_exp(-kI * t * model.hamiltonian);
  std::vector<CMatrix> out;
  out.reserve(model.lindblads.size());
  for (const auto& l : model.lindblads) out.push_back(u.adjoint() * l * u);
  return out;
}

PurityTrace purity_trace(const LindbladModel& model, const PureState& psi0, const std::vector<double>& times) {
  PurityTrace tr;
  tr.times = times;
  const auto traj = evolve(model, DensityMatrix::from_pure(psi0), times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    tr.purity.push_back(traj[k].purity());
    double rate = 0.0;
    for (const auto& l : first_order_lindblad_t(model, times[k])) rate += quasivariance(psi0, l);
    tr.rate_formula.push_back(2.0 * rate);
  }
  return tr;
}

}  // namespace gcsieve
