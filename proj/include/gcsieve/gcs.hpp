#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gcsieve/liealg.hpp"

namespace gcsieve {

/// Orbit of a reference state under exp(-i sum_k t_k X_k), X_k Hermitian.
///
/// The parametrization uses the full Hermitian basis of the representation,
/// which over-parametrizes the coset but is adequate for distance queries.
struct GcsManifold {
  LieRepresentation rep;
  PureState reference;
  std::vector<CMatrix> displacement_generators;
  /// Half-width of the parameter box used for sampling and random starts.
  double param_box = 0.0;
  /// Bosonic kinds: displacement amplitude |eta| per mode may not exceed this.
  std::optional<double> amplitude_limit;

  [[nodiscard]] int param_dim() const { return static_cast<int>(displacement_generators.size()); }
};

/// Manifold of `rep` through its highest-weight vector, or through `reference`
/// when given (reducible representations).
[[nodiscard]] GcsManifold make_manifold(const LieRepresentation& rep,
                                        std::optional<PureState> reference = std::nullopt);

/// Displacement amplitudes eta_m = (v_m - i u_m)/sqrt(2) of the quadrature
/// parameters (u_m, v_m) for each mode. Empty for non-bosonic manifolds.
[[nodiscard]] std::vector<cplx> boson_amplitudes(const GcsManifold& m, std::span<const double> params);

/// exp(-i sum_k params_k X_k) |Lambda>.
[[nodiscard]] PureState displace(const GcsManifold& m, std::span<const double> params);

[[nodiscard]] std::vector<std::vector<double>> sample_params(const GcsManifold& m, int count,
                                                             std::uint64_t seed);
[[nodiscard]] std::vector<PureState> sample_gcs(const GcsManifold& m, int count, std::uint64_t seed);

struct GcsDistanceOptions {
  int starts = default_policy().gcs_starts;
  int max_iter = default_policy().gcs_max_iter;
  std::uint64_t seed = 0x5eedULL;
  /// Include a moment-based start (<J> direction or <a>) before the random ones.
  bool informed_start = true;
  /// Remaining starts are skipped once a start reaches this infidelity.
  double stop_below = 1e-13;
};

struct GcsDistance {
  double infidelity = 1.0;
  std::vector<double> best_params;
  /// Final infidelity of every start, ascending.
  std::vector<double> start_values;
  /// True when the two best starts agree within policy.gcs_agreement, or the
  /// search stopped at a numerically exact hit.
  bool agreed = false;
};

[[nodiscard]] GcsDistance gcs_distance(const PureState& state, const GcsManifold& m,
                                       const GcsDistanceOptions& opts = {});

}  // namespace gcsieve
