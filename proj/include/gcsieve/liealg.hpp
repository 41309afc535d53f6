#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gcsieve/opsalg.hpp"

namespace gcsieve {

/// Spin quantum number stored as 2J so half-integers are exact.
class Spin {
 public:
  constexpr Spin() = default;
  static constexpr Spin from_twice(int twice_j) { return Spin(twice_j); }
  /// Throws unless 2J is a nonnegative integer.
  static Spin from_value(double j);

  [[nodiscard]] constexpr int twice() const { return twice_; }
  [[nodiscard]] constexpr double value() const { return 0.5 * twice_; }
  [[nodiscard]] constexpr int multiplet_dim() const { return twice_ + 1; }
  [[nodiscard]] std::string label() const;

  friend constexpr auto operator<=>(Spin, Spin) = default;

 private:
  constexpr explicit Spin(int twice_j) : twice_(twice_j) {}
  int twice_ = 0;
};

enum class AlgebraKind { Su2Irrep, Su2Collective, Heisenberg, Squeeze };

struct LabeledOperator {
  std::string label;
  CMatrix op;
};

/// Concrete matrix representation of a dynamical Lie algebra.
struct LieRepresentation {
  std::string name;
  AlgebraKind kind = AlgebraKind::Su2Irrep;
  Eigen::Index dim = 0;
  std::vector<LabeledOperator> basis;            // complex basis of the algebra
  std::vector<LabeledOperator> hermitian_basis;  // real form, spans the same algebra
  std::vector<CMatrix> raising;                  // annihilate the reference state
  RMatrix gram;                                  // Re tr(X_j X_k) / dim
  CMatrix casimir;                               // sum_j X_j^2
  PureState highest_weight_vector;
  bool normalized = false;

  // Kind-specific parameters.
  std::optional<Spin> spin;     // Su2Irrep
  std::optional<int> n_spins;   // Su2Collective
  std::optional<int> cutoff;    // bosonic kinds: Fock levels 0..cutoff per mode
  int modes = 1;

  /// Indices of basis states where truncation artifacts are absent.
  std::vector<Eigen::Index> guarded;

  [[nodiscard]] std::vector<CMatrix> hermitian_ops() const;
  [[nodiscard]] const CMatrix& op(const std::string& label) const;
  [[nodiscard]] bool is_bosonic() const {
    return kind == AlgebraKind::Heisenberg || kind == AlgebraKind::Squeeze;
  }
};

/// Spin-J irrep of su(2) in the basis |J,J>, |J,J-1>, ..., |J,-J>.
[[nodiscard]] LieRepresentation spin_rep(Spin j);
[[nodiscard]] LieRepresentation spin_rep(double j);

/// Oscillator algebra {1, a_i, a_i^dag} on (cutoff+1)^modes Fock states.
[[nodiscard]] LieRepresentation boson_rep(int cutoff, int modes = 1);

/// Single-mode algebra {1, a, a^dag, a^2, a^dag^2, a^dag a + 1/2}.
[[nodiscard]] LieRepresentation squeeze_rep(int cutoff);

/// Total-spin representation J_a = sum_i sigma_a^(i) / 2 on N qubits.
[[nodiscard]] LieRepresentation collective_spin_rep(int n_spins);

/// Builds a representation from {"name": ..., "parameters": {...}}.
[[nodiscard]] LieRepresentation make_representation(const nlohmann::json& spec);
/// Parses "su2-spinJ:J=1", "h3-boson:cutoff=30,modes=2", ... or a JSON object string.
[[nodiscard]] LieRepresentation make_representation(const std::string& spec);
[[nodiscard]] inline LieRepresentation make_representation(const char* spec) {
  return make_representation(std::string(spec));
}

/// Largest relative residual of [b_i, b_j] after least-squares projection onto
/// span(basis), evaluated on the guarded subspace.
[[nodiscard]] double closure_residual(const LieRepresentation& rep);

/// Largest ||R |Lambda>|| over the raising operators.
[[nodiscard]] double highest_weight_residual(const LieRepresentation& rep);

/// Rescales the Hermitian basis so the trace-form Gram matrix is a multiple of
/// the identity, calibrated so su(2) uses the bare J_a and the oscillator uses
/// canonical quadratures with [x, p] = i.
[[nodiscard]] LieRepresentation orthonormalize_basis(const LieRepresentation& rep);

[[nodiscard]] RMatrix trace_gram(const std::vector<CMatrix>& ops);

struct WclCertificate {
  std::vector<double> lambdas;
  std::vector<double> residuals;
  std::vector<bool> passed;

  [[nodiscard]] bool all_passed() const;
};

/// Fits [H, L] = lambda L for each Lindblad operator and reports residuals
/// ||[H,L] - lambda L|| / ||L||.
[[nodiscard]] WclCertificate wcl_check(const CMatrix& hamiltonian,
                                       const std::vector<CMatrix>& lindblads,
                                       const NumericPolicy& policy = default_policy());

// Fock-space building blocks.
[[nodiscard]] CMatrix annihilation(int cutoff);
/// a_mode acting on a `modes`-mode truncated Fock space.
[[nodiscard]] CMatrix annihilation(int cutoff, int modes, int mode);

}  // namespace gcsieve
