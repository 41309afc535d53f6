#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "gcsieve/lindblad.hpp"
#include "gcsieve/sieve.hpp"

namespace gcsieve {

struct IrrepBlock {
  Spin j;
  int irrep_dim = 0;
  int multiplicity = 0;
  /// dim x (multiplicity * irrep_dim); column alpha * irrep_dim + k holds
  /// copy alpha, weight m = j - k.
  CMatrix isometry;
};

/// Decomposition of a collective su(2) representation into spin-j blocks,
/// ordered by descending j.
struct IrrepDecomposition {
  LieRepresentation rep;
  std::vector<IrrepBlock> blocks;

  [[nodiscard]] const IrrepBlock& block(Spin j) const;
};

[[nodiscard]] IrrepDecomposition decompose(const LieRepresentation& rep);

/// Largest ||V^dag G V - I_n kron g|| over blocks and Hermitian generators.
[[nodiscard]] double block_action_residual(const IrrepDecomposition& d);

/// Orthonormal basis (columns) of the joint kernel of the Lindblad operators.
[[nodiscard]] CMatrix dfs_extract(const LindbladModel& model);

struct Theorem4Options {
  int n_random = 20;
  int n_starts = 16;
  std::uint64_t seed = 4;
  /// Time at which DFS states are checked for stationarity.
  double t_check = 5.0;
};

struct Theorem4Report {
  int dfs_dim = 0;
  double max_dfs_uncertainty = 0.0;  // over basis vectors and random combinations
  double max_dfs_rate = 0.0;
  double stationary_infidelity = 0.0;
  double complement_min_uncertainty = 0.0;
  double smallest_nonzero_bound = 0.0;
  double full_min_uncertainty = 0.0;
  double smallest_block_bound = 0.0;
  bool passed = false;
};

[[nodiscard]] Theorem4Report verify_theorem4(const LindbladModel& model, const LieRepresentation& rep,
                                             const Theorem4Options& opts = {});

/// Minimum of the invariant uncertainty over unit vectors in span(isometry).
[[nodiscard]] DescentResult min_uncertainty_in_subspace(const LieRepresentation& rep, const CMatrix& isometry,
                                                        int n_starts, std::uint64_t seed);

struct NoiselessSubsystem {
  int ns_dim = 0;
  int noisy_dim = 0;
  CMatrix isometry;
  int commutant_dim = 0;
  double action_residual = 0.0;
};

[[nodiscard]] NoiselessSubsystem ns_identify(const IrrepDecomposition& d, Spin j);

[[nodiscard]] nlohmann::json to_json(const IrrepDecomposition& d);
[[nodiscard]] nlohmann::json to_json(const Theorem4Report& r);

}  // namespace gcsieve
