#pragma once

#include <nlohmann/json.hpp>

namespace gcsieve {

/// Tolerances and iteration budgets shared by operations and tests.
///
/// Every threshold that decides whether a numerical object is valid (a
/// Hermitian matrix, a normalized state, a converged optimizer) lives here,
/// so that tests can state their expectations against the same record the
/// operations used.
struct NumericPolicy {
  // Structural checks.
  double hermitian_rel = 1e-12;
  double unitary_abs = 1e-10;
  double state_norm = 1e-12;
  double state_equality = 1e-10;
  double density_trace = 1e-12;
  double density_min_eig = -1e-10;

  // Rank decisions: singular values below kernel_rel * largest count as zero.
  double kernel_rel = 1e-9;
  double commutant_rank = 1e-8;

  // Lie algebra.
  double closure_residual = 1e-9;
  double wcl_residual = 1e-9;
  double highest_weight = 1e-10;

  // Truncated bosons: levels k <= cutoff - guard_levels are trusted.
  int guard_levels = 2;
  // Weight a state may carry outside the trusted levels before bosonic
  // properties stop being asserted on it.
  double leakage_abs = 1e-8;

  // Sieve optimizer (projected gradient with backtracking).
  double sieve_grad_tol = 1e-8;
  int sieve_max_iter = 10000;
  int sieve_default_starts = 32;
  double sieve_distinct = 1e-4;

  // GCS distance (multistart quasi-Newton over displacement parameters).
  int gcs_starts = 20;
  int gcs_max_iter = 400;
  double gcs_fd_step = 1e-6;
  double gcs_agreement = 1e-6;

  // Finite-difference step for purity-rate oracles, scaled by 1/||L||.
  double fd_step_scale = 1e-5;
};

inline const NumericPolicy& default_policy() {
  static const NumericPolicy policy{};
  return policy;
}

inline nlohmann::json to_json(const NumericPolicy& p) {
  return nlohmann::json{
      {"hermitian_rel", p.hermitian_rel},
      {"unitary_abs", p.unitary_abs},
      {"state_norm", p.state_norm},
      {"state_equality", p.state_equality},
      {"density_trace", p.density_trace},
      {"density_min_eig", p.density_min_eig},
      {"kernel_rel", p.kernel_rel},
      {"commutant_rank", p.commutant_rank},
      {"closure_residual", p.closure_residual},
      {"wcl_residual", p.wcl_residual},
      {"highest_weight", p.highest_weight},
      {"guard_levels", p.guard_levels},
      {"leakage_abs", p.leakage_abs},
      {"sieve_grad_tol", p.sieve_grad_tol},
      {"sieve_max_iter", p.sieve_max_iter},
      {"sieve_default_starts", p.sieve_default_starts},
      {"sieve_distinct", p.sieve_distinct},
      {"gcs_starts", p.gcs_starts},
      {"gcs_max_iter", p.gcs_max_iter},
      {"gcs_fd_step", p.gcs_fd_step},
      {"gcs_agreement", p.gcs_agreement},
      {"fd_step_scale", p.fd_step_scale},
  };
}

}  // namespace gcsieve
