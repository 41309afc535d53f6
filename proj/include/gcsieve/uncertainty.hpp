#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "gcsieve/gcs.hpp"

namespace gcsieve {

/// Pure-state quantum Fisher information matrix for a list of generators.
struct QfiMatrix {
  std::vector<CMatrix> generators;
  /// 4 <(K_j - <K_j>)(K_k - <K_k>)>, complex and non-symmetric off the diagonal.
  CMatrix entries;
  /// Entrywise real part of `entries`.
  RMatrix symmetrized;

  [[nodiscard]] double trace() const { return entries.trace().real(); }
};

[[nodiscard]] QfiMatrix qfi_matrix(const PureState& state, const std::vector<CMatrix>& generators);

/// Sum of variances over the normalized Hermitian basis: tr(QFI)/4.
[[nodiscard]] double invariant_uncertainty(const PureState& state, const LieRepresentation& rep);

/// Invariant uncertainty of the highest-weight state, the minimum over all
/// states for an irreducible representation.
[[nodiscard]] double theorem1_bound(const LieRepresentation& rep);

struct AttainmentCheck {
  double epsilon = 0.0;         // states with (dI)^2 <= bound + epsilon ...
  double max_infidelity = 0.0;  // ... must be this close to the GCS manifold
  int count = 0;                // number of such states found
  double worst_infidelity = 0.0;
  bool passed = true;
};

struct Theorem1Report {
  std::string rep;
  double bound = 0.0;
  double min_over_random = 0.0;
  double attainment_gap = 0.0;  // min_over_random - bound
  int n_random = 0;
  std::uint64_t seed = 0;
  std::vector<AttainmentCheck> attainment;
  bool bound_respected = false;
  bool passed = false;
};

struct Theorem1Options {
  double bound_slack = 1e-9;
  /// (epsilon, max infidelity) pairs; checked in ascending epsilon order.
  std::vector<std::pair<double, double>> attainment = {{1e-3, 1e-2}, {1e-2, 1e-1}};
  GcsDistanceOptions distance{};
};

/// Samples Haar-random states, checks (dI)^2 >= bound and that near-bound
/// states lie close to the GCS manifold.
[[nodiscard]] Theorem1Report verify_theorem1(const LieRepresentation& rep, int n_random,
                                             std::uint64_t seed, const Theorem1Options& opts = {});

[[nodiscard]] nlohmann::json to_json(const Theorem1Report& r);

}  // namespace gcsieve
