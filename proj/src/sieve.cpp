#include "gcsieve/sieve.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "gcsieve/report.hpp"

namespace gcsieve {

QuasivarianceSum::QuasivarianceSum(std::vector<CMatrix> ops, double weight)
    : applied_(std::move(ops)), weight_(weight) {
  if (applied_.empty()) throw Error("QuasivarianceSum: no operators");
  dim_ = applied_.front().cols();
  for (const auto& op : applied_) {
    require_square(op, "QuasivarianceSum");
    if (op.cols() != dim_) throw DimensionError("QuasivarianceSum: dimension mismatch");
  }
}

double QuasivarianceSum::value(const CVector& c) const {
  const CVector psi = isometry_.size() ? CVector(isometry_ * c) : c;
  double total = 0.0;
  for (const auto& a : applied_) {
    const CVector lpsi = a * c;
    const cplx mean = psi.dot(lpsi);
    total += (lpsi - mean * psi).squaredNorm();
  }
  return weight_ * total;
}

CVector QuasivarianceSum::euclidean_gradient(const CVector& c) const {
  // With r = (L - mu) psi and r orthogonal to psi, df = 2 Re <(L - mu)^dag r, dc>.
  const bool full = isometry_.size() == 0;
  const CVector psi = full ? c : CVector(isometry_ * c);
  CVector g = CVector::Zero(c.size());
  for (const auto& a : applied_) {
    const CVector lpsi = a * c;
    const cplx mean = psi.dot(lpsi);
    const CVector r = lpsi - mean * psi;
    if (full) g += a.adjoint() * r - std::conj(mean) * r;
    else g += a.adjoint() * r - std::conj(mean) * (isometry_.adjoint() * r);
  }
  return 2.0 * weight_ * g;
}

QuasivarianceSum QuasivarianceSum::restricted(const CMatrix& isometry) const {
  if (isometry.rows() != (isometry_.size() ? isometry_.rows() : dim_))
    throw DimensionError("QuasivarianceSum::restricted: dimension mismatch");
  QuasivarianceSum out;
  out.weight_ = weight_;
  out.dim_ = isometry.cols();
  out.isometry_ = isometry_.size() ? CMatrix(isometry_ * isometry) : isometry;
  for (const auto& a : applied_) out.applied_.push_back(a * isometry);
  return out;
}

ExactAverageLoss::ExactAverageLoss(const LindbladModel& model, double tau)
    : map_(Propagator(model).step_map(tau)), tau_(tau), dim_(model.dim()) {
  if (!(tau > 0.0)) throw Error("ExactAverageLoss: tau must be positive");
}

CMatrix ExactAverageLoss::propagate(const CVector& psi) const {
  const CMatrix rho0 = psi * psi.adjoint();
  const CVector v = map_ * rho0.reshaped();
  return v.reshaped(dim_, dim_);
}

double ExactAverageLoss::value(const CVector& psi) const {
  return (1.0 - propagate(psi).squaredNorm()) / tau_;
}

CVector ExactAverageLoss::euclidean_gradient(const CVector& psi) const {
  const CMatrix rho = propagate(psi);
  const CVector back = map_.adjoint() * rho.reshaped();
  const CMatrix adj = back.reshaped(dim_, dim_);
  return -4.0 / tau_ * (adj * psi);
}

SieveObjective SieveObjective::rate(const LindbladModel& model) {
  SieveObjective o;
  o.impl_ = QuasivarianceSum(model.lindblads, 2.0);
  o.kind_ = ObjectiveKind::Rate;
  return o;
}

SieveObjective SieveObjective::first_order_average(const LindbladModel& model, double tau, int nodes) {
  if (!(tau > 0.0)) throw Error("first_order_average: tau must be positive");
  if (nodes < 3) throw Error("first_order_average: need at least 3 nodes");
  std::vector<CMatrix> ops;
  for (int k = 0; k < nodes; ++k)
    for (auto& l : first_order_lindblad_t(model, tau * k / nodes)) ops.push_back(std::move(l));
  SieveObjective o;
  o.impl_ = QuasivarianceSum(std::move(ops), 2.0 / nodes);
  o.kind_ = ObjectiveKind::FirstOrderAverage;
  o.tau_ = tau;
  return o;
}

SieveObjective SieveObjective::exact_average(const LindbladModel& model, double tau) {
  SieveObjective o;
  o.impl_ = ExactAverageLoss(model, tau);
  o.kind_ = ObjectiveKind::ExactAverage;
  o.tau_ = tau;
  return o;
}

SieveObjective SieveObjective::quasivariance_sum(std::vector<CMatrix> ops, double weight) {
  SieveObjective o;
  o.impl_ = QuasivarianceSum(std::move(ops), weight);
  o.kind_ = ObjectiveKind::Custom;
  return o;
}

double SieveObjective::value(const CVector& psi) const {
  return std::visit([&](const auto& f) { return f.value(psi); }, impl_);
}

CVector SieveObjective::euclidean_gradient(const CVector& psi) const {
  return std::visit([&](const auto& f) { return f.euclidean_gradient(psi); }, impl_);
}

Eigen::Index SieveObjective::dim() const {
  return std::visit([](const auto& f) { return f.dim(); }, impl_);
}

std::string SieveObjective::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case ObjectiveKind::Rate: return "rate";
    case ObjectiveKind::FirstOrderAverage: os << "average(tau=" << round_sig(tau_) << ",first_order)"; break;
    case ObjectiveKind::ExactAverage: os << "average(tau=" << round_sig(tau_) << ",exact)"; break;
    case ObjectiveKind::Custom: return "quasivariance_sum";
  }
  return os.str();
}

SieveObjective SieveObjective::restricted(const CMatrix& isometry) const {
  const auto* q = std::get_if<QuasivarianceSum>(&impl_);
  if (!q) throw Error("SieveObjective::restricted: only quasivariance objectives can be restricted");
  SieveObjective o = *this;
  o.impl_ = q->restricted(isometry);
  return o;
}

namespace {

CVector project_tangent(const CVector& psi, const CVector& g) { return g - psi.dot(g) * psi; }

void fix_gauge(CVector& psi) {
  Eigen::Index k = 0;
  psi.cwiseAbs().maxCoeff(&k);
  const double mag = std::abs(psi(k));
  if (mag > 0.0) psi *= std::conj(psi(k)) / mag;
}

}  // namespace

CVector gradient_of_objective(const PureState& state, const SieveObjective& objective) {
  if (state.dim() != objective.dim()) throw DimensionError("gradient_of_objective: dimension mismatch");
  return project_tangent(state.amplitudes(), objective.euclidean_gradient(state.amplitudes()));
}

CVector gradient_of_objective(const PureState& state, const LindbladModel& model) {
  return gradient_of_objective(state, SieveObjective::rate(model));
}

DescentResult minimize_on_sphere(const SieveObjective& objective, const PureState& start,
                                 const DescentOptions& opts) {
  if (start.dim() != objective.dim()) throw DimensionError("minimize_on_sphere: dimension mismatch");
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  CVector psi = start.amplitudes();
  fix_gauge(psi);
  double f = objective.value(psi);
  CVector g = project_tangent(psi, objective.euclidean_gradient(psi));
  double gnorm = g.norm();
  double alpha = gnorm > 0.0 ? 0.1 / gnorm : 1.0;

  DescentResult res;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    if (gnorm <= opts.grad_tol) {
      res.converged = true;
      break;
    }
    double trial = alpha;
    CVector next;
    double fnext = 0.0;
    CVector gnext;
    bool accepted = false;
    for (int ls = 0; ls < 80; ++ls) {
      next = psi - trial * g;
      next.normalize();
      fnext = objective.value(next);
      if (fnext <= f - 1e-4 * trial * gnorm * gnorm) {
        accepted = true;
        break;
      }
      // Below roundoff the value cannot certify descent; fall back to the gradient.
      if (std::abs(fnext - f) <= 16.0 * kEps * std::max(1.0, std::abs(f))) {
        gnext = project_tangent(next, objective.euclidean_gradient(next));
        if (gnext.norm() < gnorm) {
          accepted = true;
          break;
        }
        gnext.resize(0);
      }
      trial *= 0.5;
    }
    if (!accepted) break;
    fix_gauge(next);
    gnext = project_tangent(next, objective.euclidean_gradient(next));
    // Barzilai-Borwein step for the next trial.
    const CVector s = next - psi;
    const CVector y = gnext - g;
    const double sy = s.dot(y).real();
    alpha = sy > 0.0 ? s.squaredNorm() / sy : 2.0 * trial;
    alpha = std::clamp(alpha, 1e-12, 1e12);
    psi = std::move(next);
    f = fnext;
    g = std::move(gnext);
    gnorm = g.norm();
  }
  if (gnorm <= opts.grad_tol) res.converged = true;
  res.state = PureState::normalized(psi);
  res.value = objective.value(res.state.amplitudes());
  res.grad_norm = gnorm;
  res.iterations = it;
  return res;
}

SieveReport sieve_search(const SieveObjective& full_objective, const SieveOptions& opts,
                         const std::string& model_id) {
  if (opts.n_starts < 8) throw Error("sieve_search: need at least 8 starts");
  const Eigen::Index full_dim = full_objective.dim();
  if (opts.domain && opts.domain->rows() != full_dim)
    throw DimensionError("sieve_search: domain isometry has the wrong number of rows");
  const SieveObjective objective = opts.domain ? full_objective.restricted(*opts.domain) : full_objective;
  auto to_search = [&](const CVector& v) -> PureState {
    if (!opts.domain) return PureState::normalized(v);
    return PureState::normalized(opts.domain->adjoint() * v);
  };
  auto to_full = [&](const PureState& s) -> PureState {
    if (!opts.domain) return s;
    return PureState::normalized(*opts.domain * s.amplitudes());
  };

  std::mt19937_64 rng(opts.seed);
  std::vector<PureState> starts;
  starts.reserve(static_cast<std::size_t>(opts.n_starts));
  for (int s = 0; s < opts.n_starts; ++s) {
    if (opts.start_support.empty()) {
      starts.push_back(to_search(haar_random_state(full_dim, rng).amplitudes()));
    } else {
      const auto sub = haar_random_state(static_cast<Eigen::Index>(opts.start_support.size()), rng);
      CVector v = CVector::Zero(full_dim);
      for (std::size_t k = 0; k < opts.start_support.size(); ++k)
        v(opts.start_support[k]) = sub[static_cast<Eigen::Index>(k)];
      starts.push_back(to_search(v));
    }
  }
  // Starts are independent; results land in fixed slots so the order never depends on scheduling.
  std::vector<DescentResult> runs(starts.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < starts.size(); k = next++) {
      runs[k] = minimize_on_sphere(objective, starts[k], opts.descent);
      runs[k].state = to_full(runs[k].state);
    }
  };
  const int threads = std::clamp(opts.threads, 1, opts.n_starts);
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  std::stable_sort(runs.begin(), runs.end(),
                   [](const DescentResult& a, const DescentResult& b) { return a.value < b.value; });

  SieveReport rep;
  rep.model_id = model_id;
  rep.objective = objective.describe();
  rep.n_starts = opts.n_starts;
  rep.seed = opts.seed;
  for (const auto& r : runs) {
    if (r.converged) ++rep.n_converged;
    const bool duplicate = std::any_of(rep.minimizers.begin(), rep.minimizers.end(), [&](const Minimizer& m) {
      return 1.0 - fidelity(m.state, r.state) <= opts.distinct;
    });
    if (duplicate) continue;
    Minimizer m;
    m.state = r.state;
    m.value = r.value;
    m.grad_norm = r.grad_norm;
    m.iterations = r.iterations;
    m.converged = r.converged;
    if (opts.manifold) m.gcs_infidelity = gcs_distance(r.state, *opts.manifold, opts.distance).infidelity;
    rep.minimizers.push_back(std::move(m));
  }
  rep.global_min_value = rep.minimizers.front().value;
  return rep;
}

SieveReport sieve_search(const LindbladModel& model, const SieveOptions& opts, const std::string& model_id) {
  return sieve_search(SieveObjective::rate(model), opts, model_id);
}

std::vector<SieveReport> time_resolved_sieve(const LindbladModel& model, const std::vector<double>& t_grid,
                                             const SieveOptions& opts) {
  const CMatrix& h = model.hamiltonian;
  if ((h - CMatrix(h.diagonal().asDiagonal())).norm() > 1e-12 * std::max(1.0, h.norm()))
    throw Error("time_resolved_sieve: Hamiltonian must be diagonal (harmonic) in the Fock basis");
  std::vector<SieveReport> out;
  for (const double t : t_grid) {
    LindbladModel mt = model;
    mt.lindblads = first_order_lindblad_t(model, t);
    mt.wcl.reset();
    std::ostringstream id;
    id << "t=" << round_sig(t);
    out.push_back(sieve_search(SieveObjective::rate(mt), opts, id.str()));
  }
  return out;
}

CMatrix guarded_domain(const LieRepresentation& rep) {
  if (!rep.is_bosonic()) throw Error("guarded_domain: representation is not bosonic");
  CMatrix q = CMatrix::Zero(rep.dim, static_cast<Eigen::Index>(rep.guarded.size()));
  for (std::size_t k = 0; k < rep.guarded.size(); ++k) q(rep.guarded[k], static_cast<Eigen::Index>(k)) = 1.0;
  return q;
}

std::vector<Eigen::Index> boson_start_support(const LieRepresentation& rep) {
  if (!rep.is_bosonic()) throw Error("boson_start_support: representation is not bosonic");
  const int levels = *rep.cutoff + 1;
  const int kmax = std::max(1, *rep.cutoff / 9);
  std::vector<Eigen::Index> out;
  for (Eigen::Index idx = 0; idx < rep.dim; ++idx) {
    bool ok = true;
    for (Eigen::Index rest = idx; rest > 0; rest /= levels)
      if (rest % levels > kmax) ok = false;
    if (ok) out.push_back(idx);
  }
  return out;
}

LindbladModel brownian_model(cplx c, cplx d, double omega, int cutoff) {
  if (std::abs(std::abs(c) - std::abs(d)) <= 1e-12 * std::max(std::abs(c), std::abs(d)))
    throw Error("brownian_model: |c| = |d| has no normalizable eigenstate");
  const CMatrix a = annihilation(cutoff);
  const CMatrix h = omega * (a.adjoint() * a + 0.5 * identity(cutoff + 1));
  return make_model(h, {c * a + d * a.adjoint()}, {"c*a+d*adag"});
}

cplx squeezing_parameter(const PureState& psi, const CMatrix& a) {
  const cplx mean = expectation(psi, a);
  const cplx a2 = expectation(psi, a * a) - mean * mean;
  const double n = expectation(psi, a.adjoint() * a).real() - std::norm(mean);
  return -a2 / (n + 1.0);
}

nlohmann::json to_json(const SieveReport& r) {
  nlohmann::json mins = nlohmann::json::array();
  for (const auto& m : r.minimizers)
    mins.push_back({{"value", num(m.value)},
                    {"gcs_infidelity", num(m.gcs_infidelity)},
                    {"grad_norm", num(m.grad_norm)},
                    {"iterations", m.iterations},
                    {"converged", m.converged},
                    {"amplitudes", amplitudes_json(m.state.amplitudes())}});
  return {{"model_id", r.model_id},
          {"objective", r.objective},
          {"global_min_value", num(r.global_min_value)},
          {"n_starts", r.n_starts},
          {"n_converged", r.n_converged},
          {"seed", r.seed},
          {"minimizers", mins}};
}

std::string to_csv(const SieveReport& r) {
  std::vector<std::vector<double>> rows;
  for (const auto& m : r.minimizers)
    rows.push_back({m.value, m.gcs_infidelity, m.grad_norm, m.converged ? 1.0 : 0.0});
  return csv_table({"value", "gcs_infidelity", "grad_norm", "converged"}, rows);
}

}  // namespace gcsieve
