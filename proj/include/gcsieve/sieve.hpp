#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "gcsieve/gcs.hpp"
#include "gcsieve/lindblad.hpp"

namespace gcsieve {

/// weight * sum_l ||(L - <L>) psi||^2. A restricted sum works in the
/// coordinates c of psi = Q c for an isometry Q and keeps L Q in the full space,
/// so <L^dag L> is never truncated to the subspace.
class QuasivarianceSum {
 public:
  QuasivarianceSum() = default;
  QuasivarianceSum(std::vector<CMatrix> ops, double weight);

  [[nodiscard]] double value(const CVector& psi) const;
  /// Real Euclidean gradient 2 d f / d psi^*.
  [[nodiscard]] CVector euclidean_gradient(const CVector& psi) const;
  [[nodiscard]] QuasivarianceSum restricted(const CMatrix& isometry) const;
  [[nodiscard]] Eigen::Index dim() const { return dim_; }

 private:
  std::vector<CMatrix> applied_;  // L Q (full rows x subspace columns)
  CMatrix isometry_;               // Q; empty means identity
  double weight_ = 1.0;
  Eigen::Index dim_ = 0;
};

/// (1 - Tr Phi(|psi><psi|)^2) / tau with Phi = exp(tau L).
class ExactAverageLoss {
 public:
  ExactAverageLoss(const LindbladModel& model, double tau);

  [[nodiscard]] double value(const CVector& psi) const;
  [[nodiscard]] CVector euclidean_gradient(const CVector& psi) const;
  [[nodiscard]] Eigen::Index dim() const { return dim_; }

 private:
  [[nodiscard]] CMatrix propagate(const CVector& psi) const;
  CMatrix map_;
  double tau_;
  Eigen::Index dim_;
};

enum class ObjectiveKind { Rate, FirstOrderAverage, ExactAverage, Custom };

/// Smooth functional of a pure state minimized by the sieve.
class SieveObjective {
 public:
  /// 2 sum_l (Delta L_l)^2.
  static SieveObjective rate(const LindbladModel& model);
  /// Period average (1/tau) int_0^tau 2 sum_l (Delta L_l(t))^2 dt with the
  /// first-order Heisenberg operators, by the trapezoid rule on `nodes` points.
  static SieveObjective first_order_average(const LindbladModel& model, double tau, int nodes = 16);
  /// Exact average purity loss over [0, tau].
  static SieveObjective exact_average(const LindbladModel& model, double tau);
  /// weight * sum (Delta O)^2 over arbitrary operators.
  static SieveObjective quasivariance_sum(std::vector<CMatrix> ops, double weight = 1.0);

  [[nodiscard]] double value(const CVector& psi) const;
  [[nodiscard]] double value(const PureState& psi) const { return value(psi.amplitudes()); }
  [[nodiscard]] CVector euclidean_gradient(const CVector& psi) const;
  [[nodiscard]] Eigen::Index dim() const;
  [[nodiscard]] ObjectiveKind kind() const { return kind_; }
  [[nodiscard]] double tau() const { return tau_; }
  [[nodiscard]] std::string describe() const;

  /// Objective on span(isometry columns), expressed in subspace coordinates.
  [[nodiscard]] SieveObjective restricted(const CMatrix& isometry) const;

 private:
  std::variant<QuasivarianceSum, ExactAverageLoss> impl_;
  ObjectiveKind kind_ = ObjectiveKind::Custom;
  double tau_ = 0.0;
};

/// Riemannian gradient on the unit sphere modulo global phase:
/// g - <psi, g> psi for the Euclidean gradient g.
[[nodiscard]] CVector gradient_of_objective(const PureState& state, const SieveObjective& objective);
[[nodiscard]] CVector gradient_of_objective(const PureState& state, const LindbladModel& model);

struct DescentOptions {
  int max_iter = default_policy().sieve_max_iter;
  double grad_tol = default_policy().sieve_grad_tol;
};

struct DescentResult {
  PureState state;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Projected gradient descent with Barzilai-Borwein trial steps and
/// backtracking; phase gauge fixed by making the largest amplitude real.
[[nodiscard]] DescentResult minimize_on_sphere(const SieveObjective& objective, const PureState& start,
                                               const DescentOptions& opts = {});

struct SieveOptions {
  int n_starts = default_policy().sieve_default_starts;
  std::uint64_t seed = 1;
  double distinct = default_policy().sieve_distinct;
  DescentOptions descent{};
  /// When set, every minimizer is classified against this manifold.
  std::optional<GcsManifold> manifold;
  GcsDistanceOptions distance{};
  /// Random starts restricted to these basis indices (e.g. a truncation guard).
  std::vector<Eigen::Index> start_support;
  /// Search restricted to span(domain columns); minimizers are reported in the full space.
  std::optional<CMatrix> domain;
  /// Worker threads for the independent starts.
  int threads = 1;
};

struct Minimizer {
  PureState state;
  double value = 0.0;
  double gcs_infidelity = -1.0;  // negative when no manifold was given
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct SieveReport {
  std::string model_id;
  std::string objective;
  std::vector<Minimizer> minimizers;  // distinct, ascending by value
  double global_min_value = 0.0;
  int n_starts = 0;
  int n_converged = 0;
  std::uint64_t seed = 0;
};

/// Isometry onto the guarded Fock subspace of a bosonic representation.
[[nodiscard]] CMatrix guarded_domain(const LieRepresentation& rep);

/// Basis indices with every mode's Fock number k <= max(1, cutoff / 9), so random
/// starts carry a mean photon number inside the displacement guard |eta|^2 <= cutoff / 9.
[[nodiscard]] std::vector<Eigen::Index> boson_start_support(const LieRepresentation& rep);

[[nodiscard]] SieveReport sieve_search(const SieveObjective& objective, const SieveOptions& opts,
                                       const std::string& model_id = "model");
[[nodiscard]] SieveReport sieve_search(const LindbladModel& model, const SieveOptions& opts,
                                       const std::string& model_id = "model");

/// For each t, minimizes the instantaneous first-order rate 2 sum (Delta L_l(t))^2.
[[nodiscard]] std::vector<SieveReport> time_resolved_sieve(const LindbladModel& model,
                                                           const std::vector<double>& t_grid,
                                                           const SieveOptions& opts);

/// Single-mode model H = omega a^dag a, L = c a + d a^dag. Throws when |c| = |d|.
[[nodiscard]] LindbladModel brownian_model(cplx c, cplx d, double omega, int cutoff);

/// kappa with (a + kappa a^dag) psi ~ 0 estimated from centered second moments;
/// |kappa| = tanh r for a squeezed coherent state.
[[nodiscard]] cplx squeezing_parameter(const PureState& psi, const CMatrix& a);

[[nodiscard]] nlohmann::json to_json(const SieveReport& r);
/// value,gcs_infidelity,grad_norm,converged per minimizer.
[[nodiscard]] std::string to_csv(const SieveReport& r);

}  // namespace gcsieve
