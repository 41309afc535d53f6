#include "gcsieve/gcs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "bfgs.hpp"

namespace gcsieve {

namespace {

bool is_spin_kind(const LieRepresentation& rep) {
  return rep.kind == AlgebraKind::Su2Irrep || rep.kind == AlgebraKind::Su2Collective;
}

CMatrix generator_sum(const GcsManifold& m, std::span<const double> params) {
  CMatrix g = CMatrix::Zero(m.rep.dim, m.rep.dim);
  for (std::size_t k = 0; k < params.size(); ++k) g += params[k] * m.displacement_generators[k];
  return g;
}

bool within_guard(const GcsManifold& m, std::span<const double> params) {
  if (!m.amplitude_limit) return true;
  for (const cplx eta : boson_amplitudes(m, params))
    if (std::abs(eta) > *m.amplitude_limit) return false;
  return true;
}

CVector displace_unchecked(const GcsManifold& m, std::span<const double> params) {
  if (m.rep.kind != AlgebraKind::Heisenberg)
    return exp_action(-kI * generator_sum(m, params), m.reference.amplitudes());
  // Modes commute exactly even when truncated, so D = D_1 (x) ... (x) D_n with
  // small per-mode exponentials instead of one exponential on the full space.
  const CMatrix a = annihilation(*m.rep.cutoff);
  const CMatrix x = (a + a.adjoint()) / std::sqrt(2.0);
  const CMatrix p = -kI * (a - a.adjoint()) / std::sqrt(2.0);
  std::vector<CMatrix> factors;
  for (int md = 0; md < m.rep.modes; ++md) {
    const double u = params[static_cast<std::size_t>(2 * md)];
    const double v = params[static_cast<std::size_t>(2 * md + 1)];
    factors.push_back(mat_exp(-kI * (u * x + v * p)));
  }
  return kron_all(factors) * m.reference.amplitudes();
}

// Moment-based guess: rotate |Lambda> toward <J>, or displace by <a>.
std::vector<double> informed_params(const PureState& state, const GcsManifold& m) {
  std::vector<double> p(static_cast<std::size_t>(m.param_dim()), 0.0);
  if (is_spin_kind(m.rep)) {
    const double jx = expectation(state, m.rep.op("Jx")).real();
    const double jy = expectation(state, m.rep.op("Jy")).real();
    const double jz = expectation(state, m.rep.op("Jz")).real();
    const double r = std::sqrt(jx * jx + jy * jy + jz * jz);
    if (r < 1e-12) return p;
    const double theta = std::acos(std::clamp(jz / r, -1.0, 1.0));
    const double phi = std::atan2(jy, jx);
    // Rotation by theta about (-sin phi, cos phi, 0) maps z to <J>/|<J>|.
    p[0] = -theta * std::sin(phi);
    p[1] = theta * std::cos(phi);
    return p;
  }
  if (m.rep.is_bosonic()) {
    const int modes = m.rep.modes;
    for (int md = 0; md < modes; ++md) {
      const std::string s = modes == 1 ? std::string() : std::to_string(md + 1);
      cplx eta = expectation(state, m.rep.op("a" + s));
      if (m.amplitude_limit && std::abs(eta) > *m.amplitude_limit)
        eta *= 0.999 * *m.amplitude_limit / std::abs(eta);
      p[static_cast<std::size_t>(2 * md)] = -std::sqrt(2.0) * eta.imag();
      p[static_cast<std::size_t>(2 * md + 1)] = std::sqrt(2.0) * eta.real();
    }
  }
  return p;
}

}  // namespace

GcsManifold make_manifold(const LieRepresentation& rep, std::optional<PureState> reference) {
  GcsManifold m;
  m.rep = rep;
  m.reference = reference ? *reference : rep.highest_weight_vector;
  if (m.reference.dim() != rep.dim) throw DimensionError("make_manifold: reference dimension mismatch");
  m.displacement_generators = rep.hermitian_ops();
  if (is_spin_kind(rep)) {
    m.param_box = std::numbers::pi;
  } else {
    const double limit = std::sqrt(static_cast<double>(*rep.cutoff)) / 3.0;
    m.amplitude_limit = limit;
    m.param_box = limit;
  }
  return m;
}

std::vector<cplx> boson_amplitudes(const GcsManifold& m, std::span<const double> params) {
  std::vector<cplx> out;
  if (!m.rep.is_bosonic()) return out;
  for (int md = 0; md < m.rep.modes; ++md) {
    const double u = params[static_cast<std::size_t>(2 * md)];
    const double v = params[static_cast<std::size_t>(2 * md + 1)];
    out.emplace_back(v / std::sqrt(2.0), -u / std::sqrt(2.0));
  }
  return out;
}

PureState displace(const GcsManifold& m, std::span<const double> params) {
  if (static_cast<int>(params.size()) != m.param_dim())
    throw DimensionError("displace: expected " + std::to_string(m.param_dim()) + " parameters");
  if (!within_guard(m, params))
    throw Error("displace: displacement amplitude exceeds truncation guard");
  const CVector v = displace_unchecked(m, params);
  if (std::abs(v.norm() - 1.0) > 1e-10) throw Error("displace: norm not preserved");
  return PureState::normalized(v);
}

std::vector<std::vector<double>> sample_params(const GcsManifold& m, int count, std::uint64_t seed) {
  if (count < 1) throw Error("sample_gcs: count must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> box(-m.param_box, m.param_box);
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(count));
  while (static_cast<int>(out.size()) < count) {
    std::vector<double> p(static_cast<std::size_t>(m.param_dim()));
    for (double& x : p) x = box(rng);
    // Squeeze generators beyond the quadratures get a narrower range.
    for (std::size_t k = 2; k < p.size() && m.rep.kind == AlgebraKind::Squeeze; ++k)
      p[k] *= 0.5 / m.param_box;
    if (within_guard(m, p)) out.push_back(std::move(p));
  }
  return out;
}

std::vector<PureState> sample_gcs(const GcsManifold& m, int count, std::uint64_t seed) {
  std::vector<PureState> out;
  for (const auto& p : sample_params(m, count, seed)) out.push_back(displace(m, p));
  return out;
}

GcsDistance gcs_distance(const PureState& state, const GcsManifold& m, const GcsDistanceOptions& opts) {
  if (state.dim() != m.rep.dim) throw DimensionError("gcs_distance: dimension mismatch");
  const auto& target = state.amplitudes();
  const int n = m.param_dim();
  auto objective = [&](const Eigen::VectorXd& x) {
    const std::span<const double> p(x.data(), static_cast<std::size_t>(n));
    if (!within_guard(m, p)) return std::numeric_limits<double>::infinity();
    // The compact orbit is periodic; far-away parameters only make exp_action slower.
    if (!m.amplitude_limit && x.lpNorm<Eigen::Infinity>() > 2.0 * m.param_box)
      return std::numeric_limits<double>::infinity();
    return 1.0 - std::norm(target.dot(displace_unchecked(m, p)));
  };

  std::vector<Eigen::VectorXd> starts;
  if (opts.informed_start) {
    const auto p = informed_params(state, m);
    starts.push_back(Eigen::Map<const Eigen::VectorXd>(p.data(), n));
  }
  const int random_starts = std::max(0, opts.starts - static_cast<int>(starts.size()));
  if (random_starts > 0)
    for (const auto& p : sample_params(m, random_starts, opts.seed))
      starts.push_back(Eigen::Map<const Eigen::VectorXd>(p.data(), n));

  GcsDistance out;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& x0 : starts) {
    const auto r = detail::minimize_bfgs(objective, x0, opts.max_iter, default_policy().gcs_fd_step);
    out.start_values.push_back(r.value);
    if (r.value < best) {
      best = r.value;
      out.best_params.assign(r.x.data(), r.x.data() + n);
    }
    if (best <= opts.stop_below) break;
  }
  std::sort(out.start_values.begin(), out.start_values.end());
  out.infidelity = std::clamp(best, 0.0, 1.0);
  out.agreed = best <= opts.stop_below ||
               (out.start_values.size() >= 2 &&
                out.start_values[1] - out.start_values[0] <= default_policy().gcs_agreement);
  return out;
}

}  // namespace gcsieve
