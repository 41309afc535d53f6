#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gcsieve/policy.hpp"

namespace gcsieve {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

/// Raised when an input violates an operation's precondition.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Unit vector in a finite Hilbert space. Global phase is not fixed.
class PureState {
 public:
  PureState() = default;
  /// Takes ownership of `amplitudes`; throws unless the norm is 1 within policy.
  explicit PureState(CVector amplitudes,
                     const NumericPolicy& policy = default_policy());

  /// Normalizes an arbitrary nonzero vector.
  static PureState normalized(const CVector& v);
  static PureState basis(Eigen::Index dim, Eigen::Index k);

  [[nodiscard]] const CVector& amplitudes() const { return amps_; }
  [[nodiscard]] Eigen::Index dim() const { return amps_.size(); }
  [[nodiscard]] cplx operator[](Eigen::Index k) const { return amps_(k); }

  /// Equality up to global phase: |<this|other>| = 1 within tolerance.
  [[nodiscard]] bool same_ray(const PureState& other,
                              double tol = default_policy().state_equality) const;

 private:
  CVector amps_;
};

/// Hermitian, unit-trace, positive semidefinite matrix.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(CMatrix rho, const NumericPolicy& policy = default_policy());

  static DensityMatrix from_pure(const PureState& psi);
  static DensityMatrix maximally_mixed(Eigen::Index dim);

  [[nodiscard]] const CMatrix& matrix() const { return rho_; }
  [[nodiscard]] Eigen::Index dim() const { return rho_.rows(); }
  [[nodiscard]] double purity() const;

 private:
  CMatrix rho_;
};

struct HermitianEigen {
  RVector values;  // ascending
  CMatrix vectors; // columns, unitary
};

// Structural predicates.
[[nodiscard]] bool is_square(const CMatrix& a);
[[nodiscard]] bool is_hermitian(const CMatrix& a, double rel = default_policy().hermitian_rel);
[[nodiscard]] bool is_unitary(const CMatrix& a, double tol = default_policy().unitary_abs);
void require_square(const CMatrix& a, const char* what);
void require_hermitian(const CMatrix& a, const char* what,
                       double rel = default_policy().hermitian_rel);

[[nodiscard]] CMatrix identity(Eigen::Index dim);
[[nodiscard]] CMatrix commutator(const CMatrix& a, const CMatrix& b);
[[nodiscard]] CMatrix anticommutator(const CMatrix& a, const CMatrix& b);

/// Matrix exponential by scaling and squaring with a Pade approximant.
[[nodiscard]] CMatrix mat_exp(const CMatrix& a);

/// exp(A) v without forming exp(A); truncated Taylor series with scaling.
[[nodiscard]] CVector exp_action(const CMatrix& a, const CVector& v);

[[nodiscard]] CMatrix kron(const CMatrix& a, const CMatrix& b);
[[nodiscard]] CMatrix kron_all(const std::vector<CMatrix>& factors);

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
[[nodiscard]] HermitianEigen hermitian_eigen(const CMatrix& a);

/// Orthonormal basis (as columns) of the joint null space of `ops`.
/// Singular values below kernel_rel times the largest count as zero.
[[nodiscard]] CMatrix common_kernel(const std::vector<CMatrix>& ops,
                                    const NumericPolicy& policy = default_policy());

/// Orthonormal basis of the column span of `a` using the same rank rule.
[[nodiscard]] CMatrix column_span(const CMatrix& a, double rel = default_policy().kernel_rel);

// Pure-state statistics.
[[nodiscard]] cplx expectation(const PureState& psi, const CMatrix& op);
/// ||(O - <O>) psi||^2, defined for non-Hermitian O.
[[nodiscard]] double quasivariance(const PureState& psi, const CMatrix& op);
[[nodiscard]] double fidelity(const PureState& a, const PureState& b);

/// Haar-distributed pure state (normalized complex Gaussian vector).
[[nodiscard]] PureState haar_random_state(Eigen::Index dim, std::mt19937_64& rng);
[[nodiscard]] std::vector<PureState> haar_random_states(Eigen::Index dim, int count,
                                                        std::uint64_t seed);

// Single-qubit operators in the basis (|e>, |g>) = (|up>, |down>).
namespace pauli {
[[nodiscard]] CMatrix x();
[[nodiscard]] CMatrix y();
[[nodiscard]] CMatrix z();
/// sigma_+ = |e><g|
[[nodiscard]] CMatrix plus();
/// sigma_- = |g><e|
[[nodiscard]] CMatrix minus();
}  // namespace pauli

}  // namespace gcsieve
