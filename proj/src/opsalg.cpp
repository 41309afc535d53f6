#include "gcsieve/opsalg.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace gcsieve {

PureState::PureState(CVector amplitudes, const NumericPolicy& policy)
    : amps_(std::move(amplitudes)) {
  if (amps_.size() == 0) throw DimensionError("PureState: empty amplitude vector");
  if (!amps_.allFinite()) throw Error("PureState: non-finite amplitude");
  if (std::abs(amps_.norm() - 1.0) > policy.state_norm)
    throw Error("PureState: vector is not normalized (norm " + std::to_string(amps_.norm()) + ")");
}

PureState PureState::normalized(const CVector& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw Error("PureState: cannot normalize zero or non-finite vector");
  return PureState(v / n);
}

PureState PureState::basis(Eigen::Index dim, Eigen::Index k) {
  if (k < 0 || k >= dim) throw DimensionError("PureState::basis: index out of range");
  CVector v = CVector::Zero(dim);
  v(k) = 1.0;
  return PureState(std::move(v));
}

bool PureState::same_ray(const PureState& other, double tol) const {
  if (dim() != other.dim()) return false;
  return std::abs(1.0 - std::abs(amps_.dot(other.amps_))) <= tol;
}

DensityMatrix::DensityMatrix(CMatrix rho, const NumericPolicy& policy) : rho_(std::move(rho)) {
  require_square(rho_, "DensityMatrix");
  if (!is_hermitian(rho_, policy.hermitian_rel)) throw Error("DensityMatrix: not Hermitian");
  if (std::abs(rho_.trace() - 1.0) > policy.density_trace)
    throw Error("DensityMatrix: trace differs from one");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < policy.density_min_eig)
    throw Error("DensityMatrix: negative eigenvalue");
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  const CVector& v = psi.amplitudes();
  return DensityMatrix(v * v.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(Eigen::Index dim) {
  return DensityMatrix(identity(dim) / static_cast<double>(dim));
}

double DensityMatrix::purity() const {
  // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
  return rho_.squaredNorm();
}

bool is_square(const CMatrix& a) { return a.rows() == a.cols() && a.rows() > 0; }

void require_square(const CMatrix& a, const char* what) {
  if (!is_square(a)) throw DimensionError(std::string(what) + ": matrix is not square");
  if (!a.allFinite()) throw Error(std::string(what) + ": non-finite entries");
}

bool is_hermitian(const CMatrix& a, double rel) {
  if (!is_square(a)) return false;
  const double scale = std::max(a.norm(), 1.0);
  return (a - a.adjoint()).norm() <= rel * scale;
}

bool is_unitary(const CMatrix& a, double tol) {
  if (!is_square(a)) return false;
  return (a.adjoint() * a - identity(a.rows())).norm() <= tol;
}

void require_hermitian(const CMatrix& a, const char* what, double rel) {
  require_square(a, what);
  if (!is_hermitian(a, rel)) throw Error(std::string(what) + ": matrix is not Hermitian");
}

CMatrix identity(Eigen::Index dim) { return CMatrix::Identity(dim, dim); }

CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

CMatrix anticommutator(const CMatrix& a, const CMatrix& b) { return a * b + b * a; }

CMatrix mat_exp(const CMatrix& a) {
  require_square(a, "mat_exp");
  return a.exp();
}

CVector exp_action(const CMatrix& a, const CVector& v) {
  require_square(a, "exp_action");
  if (a.cols() != v.size()) throw DimensionError("exp_action: dimension mismatch");
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  const int steps = std::max(1, static_cast<int>(std::ceil(norm1)));
  const CMatrix scaled = a / static_cast<double>(steps);
  CVector out = v;
  for (int s = 0; s < steps; ++s) {
    CVector term = out;
    CVector sum = out;
    for (int k = 1; k <= 60; ++k) {
      term = scaled * term / static_cast<double>(k);
      sum += term;
      if (term.norm() <= 1e-17 * sum.norm()) break;
    }
    out = std::move(sum);
  }
  return out;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMatrix kron_all(const std::vector<CMatrix>& factors) {
  if (factors.empty()) throw Error("kron_all: no factors");
  CMatrix out = factors.front();
  for (std::size_t k = 1; k < factors.size(); ++k) out = kron(out, factors[k]);
  return out;
}

HermitianEigen hermitian_eigen(const CMatrix& a) {
  require_hermitian(a, "hermitian_eigen");
  // Symmetrize so the solver sees an exactly Hermitian input.
  const CMatrix h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success) throw Error("hermitian_eigen: solver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

CMatrix common_kernel(const std::vector<CMatrix>& ops, const NumericPolicy& policy) {
  if (ops.empty()) throw Error("common_kernel: empty operator list");
  const Eigen::Index d = ops.front().cols();
  for (const auto& op : ops)
    if (op.rows() != d || op.cols() != d) throw DimensionError("common_kernel: dimension mismatch");

  CMatrix stacked(d * static_cast<Eigen::Index>(ops.size()), d);
  for (std::size_t k = 0; k < ops.size(); ++k) stacked.middleRows(static_cast<Eigen::Index>(k) * d, d) = ops[k];

  Eigen::JacobiSVD<CMatrix> svd(stacked, Eigen::ComputeFullV);
  const RVector& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  Eigen::Index rank = 0;
  if (smax > 0.0)
    while (rank < s.size() && s(rank) >= policy.kernel_rel * smax) ++rank;
  return svd.matrixV().rightCols(d - rank);
}

CMatrix column_span(const CMatrix& a, double rel) {
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU);
  const RVector& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return CMatrix(a.rows(), 0);
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) >= rel * s(0)) ++rank;
  return svd.matrixU().leftCols(rank);
}

cplx expectation(const PureState& psi, const CMatrix& op) {
  if (op.cols() != psi.dim()) throw DimensionError("expectation: dimension mismatch");
  return psi.amplitudes().dot(op * psi.amplitudes());
}

double quasivariance(const PureState& psi, const CMatrix& op) {
  if (op.cols() != psi.dim()) throw DimensionError("quasivariance: dimension mismatch");
  const CVector& v = psi.amplitudes();
  const CVector ov = op * v;
  const cplx mean = v.dot(ov);
  return (ov - mean * v).squaredNorm();
}

double fidelity(const PureState& a, const PureState& b) {
  if (a.dim() != b.dim()) throw DimensionError("fidelity: dimension mismatch");
  return std::norm(a.amplitudes().dot(b.amplitudes()));
}

PureState haar_random_state(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CVector v(dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    v(k) = cplx(re, im);
  }
  return PureState::normalized(v);
}

std::vector<PureState> haar_random_states(Eigen::Index dim, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<PureState> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int k = 0; k < count; ++k) out.push_back(haar_random_state(dim, rng));
  return out;
}

namespace pauli {
CMatrix x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
CMatrix y() {
  CMatrix m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}
CMatrix z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
CMatrix plus() {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  return m;
}
CMatrix minus() {
  CMatrix m = CMatrix::Zero(2, 2);
  m(1, 0) = 1.0;
  return m;
}
}  // namespace pauli

}  // namespace gcsieve
