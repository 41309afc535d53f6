#include "gcsieve/uncertainty.hpp"

#include <algorithm>
#include <limits>

namespace gcsieve {

QfiMatrix qfi_matrix(const PureState& state, const std::vector<CMatrix>& generators) {
  const auto n = static_cast<Eigen::Index>(generators.size());
  std::vector<CVector> centered;
  centered.reserve(generators.size());
  for (const auto& k : generators) {
    require_hermitian(k, "qfi_matrix");
    if (k.cols() != state.dim()) throw DimensionError("qfi_matrix: dimension mismatch");
    const CVector kv = k * state.amplitudes();
    centered.push_back(kv - state.amplitudes().dot(kv) * state.amplitudes());
  }
  QfiMatrix q;
  q.generators = generators;
  q.entries.resize(n, n);
  // <psi|(K_j - <K_j>)(K_k - <K_k>)|psi> = <(K_j - <K_j>)psi, (K_k - <K_k>)psi>.
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k)
      q.entries(j, k) = 4.0 * centered[static_cast<std::size_t>(j)].dot(centered[static_cast<std::size_t>(k)]);
  q.symmetrized = q.entries.real();
  return q;
}

double invariant_uncertainty(const PureState& state, const LieRepresentation& rep) {
  if (state.dim() != rep.dim) throw DimensionError("invariant_uncertainty: dimension mismatch");
  if (!rep.normalized) throw Error("invariant_uncertainty: representation basis is not normalized");
  double total = 0.0;
  for (const auto& x : rep.hermitian_basis) total += quasivariance(state, x.op);
  return total;
}

double theorem1_bound(const LieRepresentation& rep) {
  if (rep.highest_weight_vector.dim() != rep.dim)
    throw Error("theorem1_bound: representation has no reference state");
  return invariant_uncertainty(rep.highest_weight_vector, rep);
}

Theorem1Report verify_theorem1(const LieRepresentation& rep, int n_random, std::uint64_t seed,
                               const Theorem1Options& opts) {
  Theorem1Report r;
  r.rep = rep.name;
  r.n_random = n_random;
  r.seed = seed;
  r.bound = theorem1_bound(rep);

  const auto states = haar_random_states(rep.dim, n_random, seed);
  std::vector<double> values;
  values.reserve(states.size());
  for (const auto& s : states) values.push_back(invariant_uncertainty(s, rep));
  r.min_over_random = values.empty() ? std::numeric_limits<double>::infinity()
                                     : *std::min_element(values.begin(), values.end());
  r.attainment_gap = r.min_over_random - r.bound;
  r.bound_respected = r.min_over_random >= r.bound - opts.bound_slack;

  auto checks = opts.attainment;
  std::sort(checks.begin(), checks.end());
  const double widest = checks.empty() ? -1.0 : checks.back().first;
  // Distances are computed once per candidate state and shared across epsilons.
  const GcsManifold manifold = make_manifold(rep);
  std::vector<std::pair<double, double>> near;  // (value - bound, infidelity)
  for (std::size_t k = 0; k < states.size(); ++k) {
    const double excess = values[k] - r.bound;
    if (excess > widest) continue;
    near.emplace_back(excess, gcs_distance(states[k], manifold, opts.distance).infidelity);
  }
  r.passed = r.bound_respected;
  for (const auto& [eps, delta] : checks) {
    AttainmentCheck c;
    c.epsilon = eps;
    c.max_infidelity = delta;
    for (const auto& [excess, inf] : near) {
      if (excess > eps) continue;
      ++c.count;
      c.worst_infidelity = std::max(c.worst_infidelity, inf);
    }
    c.passed = c.worst_infidelity <= delta;
    r.passed = r.passed && c.passed;
    r.attainment.push_back(c);
  }
  return r;
}

nlohmann::json to_json(const Theorem1Report& r) {
  nlohmann::json att = nlohmann::json::array();
  for (const auto& c : r.attainment)
    att.push_back({{"epsilon", c.epsilon},
                   {"max_infidelity", c.max_infidelity},
                   {"count", c.count},
                   {"worst_infidelity", c.worst_infidelity},
                   {"passed", c.passed}});
  return {{"rep", r.rep},
          {"bound", r.bound},
          {"min_random", r.min_over_random},
          {"attainment_gap", r.attainment_gap},
          {"n_random", r.n_random},
          {"seed", r.seed},
          {"attainment", att},
          {"passed", r.passed}};
}

}  // namespace gcsieve
