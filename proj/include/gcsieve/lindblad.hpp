#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gcsieve/liealg.hpp"

namespace gcsieve {

/// Hamiltonian plus Lindblad operators with rates already absorbed (L = sqrt(gamma) L~).
struct LindbladModel {
  CMatrix hamiltonian;
  std::vector<CMatrix> lindblads;
  std::vector<std::string> labels;
  std::optional<WclCertificate> wcl;

  [[nodiscard]] Eigen::Index dim() const { return hamiltonian.rows(); }
  /// sum_l [L_l, L_l^dag] = 0, so the maximally mixed state is stationary.
  [[nodiscard]] bool is_unital(double tol = 1e-10) const;
};

/// Validates and assembles a model; when `certify_wcl` is set the weak-coupling
/// certificate is attached and must pass.
[[nodiscard]] LindbladModel make_model(CMatrix hamiltonian, std::vector<CMatrix> lindblads,
                                       std::vector<std::string> labels = {},
                                       bool certify_wcl = false);

/// sum_l (L rho L^dag - 1/2 {L^dag L, rho})
[[nodiscard]] CMatrix dissipator(const LindbladModel& model, const DensityMatrix& rho);

/// Generator acting on column-major vec(rho): vec(A X B) = (B^T kron A) vec(X).
[[nodiscard]] CMatrix liouvillian(const LindbladModel& model);

/// Exact propagation rho(t) = unvec(exp(t L) vec rho0) with cached step maps.
class Propagator {
 public:
  explicit Propagator(const LindbladModel& model);

  [[nodiscard]] std::vector<DensityMatrix> evolve(const DensityMatrix& rho0,
                                                  const std::vector<double>& times);
  [[nodiscard]] const CMatrix& generator() const { return generator_; }
  /// exp(t L); t may be negative (used by finite-difference oracles).
  [[nodiscard]] CMatrix step_map(double t) const;

 private:
  const CMatrix& cached_step(double dt);

  Eigen::Index dim_ = 0;
  CMatrix generator_;
  std::vector<std::pair<double, CMatrix>> cache_;
};

[[nodiscard]] std::vector<DensityMatrix> evolve(const LindbladModel& model, const DensityMatrix& rho0,
                                                const std::vector<double>& times);

/// Instantaneous purity-loss rate 2 sum_l (Delta L_l)^2 for a pure state.
[[nodiscard]] double purity_rate(const PureState& state, const LindbladModel& model);

/// (Pi(tau) - Pi(0)) / tau from exact evolution, Pi = 1 - Tr rho^2.
[[nodiscard]] double average_purity_loss(const PureState& state, const LindbladModel& model,
                                         double tau, int n_steps = 1);

/// Heisenberg-picture operators e^{iHt} L e^{-iHt} (dissipation neglected).
[[nodiscard]] std::vector<CMatrix> first_order_lindblad_t(const LindbladModel& model, double t);

struct PurityTrace {
  std::vector<double> times;
  std::vector<double> purity;
  std::vector<double> rate_formula;
};

/// Purity along the exact trajectory plus the first-order rate formula
/// 2 sum_l (Delta L_l(t))^2 evaluated on the initial state.
[[nodiscard]] PurityTrace purity_trace(const LindbladModel& model, const PureState& psi0,
                                       const std::vector<double>& times);

}  // namespace gcsieve
