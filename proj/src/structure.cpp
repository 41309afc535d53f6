#include "gcsieve/structure.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "gcsieve/report.hpp"
#include "gcsieve/uncertainty.hpp"

namespace gcsieve {

namespace {

// Deterministic basis of span(h): Gram-Schmidt on the projections of e_0, e_1, ...
CMatrix canonical_basis(const CMatrix& h) {
  const Eigen::Index dim = h.rows();
  const Eigen::Index n = h.cols();
  CMatrix out(dim, n);
  Eigen::Index found = 0;
  for (Eigen::Index k = 0; k < dim && found < n; ++k) {
    CVector v = h * h.row(k).adjoint();  // P e_k with P = h h^dag
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index c = 0; c < found; ++c) v -= out.col(c).dot(v) * out.col(c);
    if (v.norm() > 1e-6) out.col(found++) = v.normalized();
  }
  if (found != n) throw Error("decompose: failed to build a canonical multiplicity basis");
  return out;
}

bool lex_less(const CVector& a, const CVector& b) {
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    if (std::abs(a(k).real() - b(k).real()) > 1e-12) return a(k).real() < b(k).real();
    if (std::abs(a(k).imag() - b(k).imag()) > 1e-12) return a(k).imag() < b(k).imag();
  }
  return false;
}

CMatrix complement_basis(const CMatrix& sub, Eigen::Index dim) {
  if (sub.cols() == 0) return identity(dim);
  Eigen::HouseholderQR<CMatrix> qr(sub);
  const CMatrix q = qr.householderQ() * identity(dim);
  return q.rightCols(dim - sub.cols());
}

}  // namespace

const IrrepBlock& IrrepDecomposition::block(Spin j) const {
  for (const auto& b : blocks)
    if (b.j == j) return b;
  throw Error("decomposition has no block with j = " + j.label());
}

IrrepDecomposition decompose(const LieRepresentation& rep) {
  if (rep.kind != AlgebraKind::Su2Collective && rep.kind != AlgebraKind::Su2Irrep)
    throw Error("decompose: only su(2) spin representations are supported");
  if (closure_residual(rep) > default_policy().closure_residual)
    throw Error("decompose: basis does not close under commutation");
  const CMatrix& jz = rep.op("Jz");
  const CMatrix& jp = rep.op("Jp");
  const CMatrix jm = jp.adjoint();

  const auto eig = hermitian_eigen(rep.casimir);
  std::map<int, std::vector<Eigen::Index>, std::greater<>> groups;  // 2j -> eigenvector columns
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    const double c = std::max(0.0, eig.values(k));
    const double twice_j = std::sqrt(1.0 + 4.0 * c) - 1.0;
    const double r = std::round(twice_j);
    if (std::abs(twice_j - r) > 1e-6) throw Error("decompose: Casimir eigenvalue is not j(j+1)");
    groups[static_cast<int>(r)].push_back(k);
  }

  IrrepDecomposition out;
  out.rep = rep;
  for (const auto& [twice_j, cols] : groups) {
    const Spin j = Spin::from_twice(twice_j);
    const int d = j.multiplet_dim();
    CMatrix w(rep.dim, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) w.col(static_cast<Eigen::Index>(c)) = eig.vectors.col(cols[c]);
    if (cols.size() % static_cast<std::size_t>(d) != 0)
      throw Error("decompose: Casimir eigenspace dimension is not a multiple of 2j+1");
    const auto mult = static_cast<Eigen::Index>(cols.size()) / d;

    // Top weight level inside the Casimir eigenspace: highest-weight vectors.
    const auto top = hermitian_eigen(CMatrix(w.adjoint() * jz * w));
    const CMatrix hw_raw = w * top.vectors.rightCols(mult);
    for (Eigen::Index c = 0; c < mult; ++c)
      if (std::abs(top.values(top.values.size() - 1 - c) - j.value()) > 1e-8)
        throw Error("decompose: inconsistent weight structure");
    CMatrix hw = canonical_basis(hw_raw);
    std::vector<CVector> sorted;
    for (Eigen::Index c = 0; c < mult; ++c) sorted.emplace_back(hw.col(c));
    std::sort(sorted.begin(), sorted.end(), lex_less);

    IrrepBlock b;
    b.j = j;
    b.irrep_dim = d;
    b.multiplicity = static_cast<int>(mult);
    b.isometry.resize(rep.dim, mult * d);
    for (Eigen::Index a = 0; a < mult; ++a) {
      CVector v = sorted[static_cast<std::size_t>(a)];
      if ((jp * v).norm() > 1e-8) throw Error("decompose: highest-weight vector not annihilated by J+");
      for (int k = 0; k < d; ++k) {
        b.isometry.col(a * d + k) = v;
        const double m = j.value() - k;
        const double norm = std::sqrt(j.value() * (j.value() + 1.0) - m * (m - 1.0));
        if (k + 1 < d) v = (jm * v) / norm;
      }
    }
    out.blocks.push_back(std::move(b));
  }
  return out;
}

double block_action_residual(const IrrepDecomposition& d) {
  double worst = 0.0;
  for (const auto& b : d.blocks) {
    const CMatrix id = identity(b.multiplicity);
    if (b.j.twice() == 0) {
      for (const auto& g : d.rep.hermitian_basis)
        worst = std::max(worst, (b.isometry.adjoint() * g.op * b.isometry).norm());
      continue;
    }
    const auto irrep = spin_rep(b.j);
    for (const auto& g : d.rep.hermitian_basis) {
      const CMatrix lhs = b.isometry.adjoint() * g.op * b.isometry;
      worst = std::max(worst, (lhs - kron(id, irrep.op(g.label))).norm());
    }
  }
  return worst;
}

CMatrix dfs_extract(const LindbladModel& model) { return common_kernel(model.lindblads); }

DescentResult min_uncertainty_in_subspace(const LieRepresentation& rep, const CMatrix& isometry, int n_starts,
                                          std::uint64_t seed) {
  if (isometry.cols() == 0) throw Error("min_uncertainty_in_subspace: empty subspace");
  const auto objective = SieveObjective::quasivariance_sum(rep.hermitian_ops(), 1.0).restricted(isometry);
  SieveOptions opts;
  opts.n_starts = n_starts;
  opts.seed = seed;
  const auto report = sieve_search(objective, opts, "uncertainty");
  const auto& best = report.minimizers.front();
  DescentResult r;
  r.state = PureState::normalized(isometry * best.state.amplitudes());
  r.value = best.value;
  r.grad_norm = best.grad_norm;
  r.iterations = best.iterations;
  r.converged = best.converged;
  return r;
}

Theorem4Report verify_theorem4(const LindbladModel& model, const LieRepresentation& rep,
                               const Theorem4Options& opts) {
  if (model.dim() != rep.dim) throw DimensionError("verify_theorem4: dimension mismatch");
  Theorem4Report r;
  const CMatrix dfs = dfs_extract(model);
  r.dfs_dim = static_cast<int>(dfs.cols());

  std::vector<PureState> probes;
  for (Eigen::Index c = 0; c < dfs.cols(); ++c) probes.push_back(PureState::normalized(dfs.col(c)));
  if (dfs.cols() > 0)
    for (const auto& coeff : haar_random_states(dfs.cols(), opts.n_random, opts.seed))
      probes.push_back(PureState::normalized(dfs * coeff.amplitudes()));
  for (const auto& p : probes) {
    r.max_dfs_uncertainty = std::max(r.max_dfs_uncertainty, invariant_uncertainty(p, rep));
    r.max_dfs_rate = std::max(r.max_dfs_rate, purity_rate(p, model));
  }
  if (dfs.cols() > 0) {
    Propagator prop(model);
    for (Eigen::Index c = 0; c < dfs.cols(); ++c) {
      const PureState phi = PureState::normalized(dfs.col(c));
      const auto rho = prop.evolve(DensityMatrix::from_pure(phi), {opts.t_check}).back();
      const double f = expectation(phi, rho.matrix()).real();
      r.stationary_infidelity = std::max(r.stationary_infidelity, 1.0 - f);
    }
  }

  const auto decomposition = decompose(rep);
  r.smallest_block_bound = std::numeric_limits<double>::infinity();
  r.smallest_nonzero_bound = std::numeric_limits<double>::infinity();
  for (const auto& b : decomposition.blocks) {
    const double bound = b.j.value();  // invariant uncertainty of a spin-j highest weight
    r.smallest_block_bound = std::min(r.smallest_block_bound, bound);
    if (bound > 0.0) r.smallest_nonzero_bound = std::min(r.smallest_nonzero_bound, bound);
  }

  const CMatrix comp = complement_basis(dfs, rep.dim);
  r.complement_min_uncertainty = comp.cols() > 0
                                     ? min_uncertainty_in_subspace(rep, comp, opts.n_starts, opts.seed + 1).value
                                     : std::numeric_limits<double>::infinity();
  r.full_min_uncertainty = min_uncertainty_in_subspace(rep, identity(rep.dim), opts.n_starts, opts.seed + 2).value;

  const auto& pol = default_policy();
  r.passed = r.max_dfs_uncertainty <= pol.highest_weight && r.max_dfs_rate <= pol.highest_weight &&
             r.stationary_infidelity <= 1e-8 && r.complement_min_uncertainty >= r.smallest_nonzero_bound - 1e-6 &&
             std::abs(r.full_min_uncertainty - r.smallest_block_bound) <= 1e-6;
  return r;
}

NoiselessSubsystem ns_identify(const IrrepDecomposition& d, Spin j) {
  const auto& b = d.block(j);
  if (b.multiplicity < 2) throw Error("ns_identify: multiplicity 1 carries no noiseless subsystem");
  NoiselessSubsystem ns;
  ns.ns_dim = b.multiplicity;
  ns.noisy_dim = b.irrep_dim;
  ns.isometry = b.isometry;

  const Eigen::Index n = b.isometry.cols();
  const CMatrix id_n = identity(b.multiplicity);
  const CMatrix id_block = identity(n);
  const auto& gens = d.rep.hermitian_basis;
  CMatrix stacked(static_cast<Eigen::Index>(gens.size()) * n * n, n * n);
  for (std::size_t a = 0; a < gens.size(); ++a) {
    const CMatrix g = b.isometry.adjoint() * gens[a].op * b.isometry;
    const CMatrix expected = j.twice() == 0 ? CMatrix::Zero(n, n) : kron(id_n, spin_rep(j).op(gens[a].label));
    ns.action_residual = std::max(ns.action_residual, (g - expected).norm());
    // vec([X, G]) = (G^T kron I - I kron G) vec(X)
    stacked.middleRows(static_cast<Eigen::Index>(a) * n * n, n * n) = kron(g.transpose(), id_block) - kron(id_block, g);
  }
  Eigen::JacobiSVD<CMatrix> svd(stacked);
  const RVector& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  Eigen::Index rank = 0;
  if (smax > 0.0)
    while (rank < s.size() && s(rank) > default_policy().commutant_rank * smax) ++rank;
  ns.commutant_dim = static_cast<int>(n * n - rank);
  return ns;
}

nlohmann::json to_json(const IrrepDecomposition& d) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : d.blocks)
    blocks.push_back({{"j", b.j.value()}, {"dim", b.irrep_dim}, {"multiplicity", b.multiplicity}});
  return {{"rep", d.rep.name}, {"dim", d.rep.dim}, {"blocks", blocks}};
}

nlohmann::json to_json(const Theorem4Report& r) {
  return {{"dfs_dim", r.dfs_dim},
          {"max_dfs_uncertainty", num(r.max_dfs_uncertainty)},
          {"max_dfs_rate", num(r.max_dfs_rate)},
          {"stationary_infidelity", num(r.stationary_infidelity)},
          {"complement_min_uncertainty", num(r.complement_min_uncertainty)},
          {"smallest_nonzero_bound", num(r.smallest_nonzero_bound)},
          {"full_min_uncertainty", num(r.full_min_uncertainty)},
          {"smallest_block_bound", num(r.smallest_block_bound)},
          {"passed", r.passed}};
}

}  // namespace gcsieve
