#include "gcsieve/liealg.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace gcsieve {

namespace {

double spin_dim_value(double j) { return j * (j + 1.0); }

CMatrix restrict_to(const CMatrix& m, const std::vector<Eigen::Index>& idx) {
  const auto n = static_cast<Eigen::Index>(idx.size());
  CMatrix out(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) out(r, c) = m(idx[r], idx[c]);
  return out;
}

std::vector<Eigen::Index> all_indices(Eigen::Index dim) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(dim));
  for (Eigen::Index k = 0; k < dim; ++k) idx[static_cast<std::size_t>(k)] = k;
  return idx;
}

void finish(LieRepresentation& rep) {
  const auto ops = rep.hermitian_ops();
  rep.gram = trace_gram(ops);
  rep.casimir = CMatrix::Zero(rep.dim, rep.dim);
  for (const auto& x : ops) rep.casimir += x * x;
}

std::string mode_suffix(int modes, int mode) {
  return modes == 1 ? std::string() : std::to_string(mode + 1);
}

}  // namespace

Spin Spin::from_value(double j) {
  const double twice = 2.0 * j;
  const double rounded = std::round(twice);
  if (!std::isfinite(j) || std::abs(twice - rounded) > 1e-12 || rounded < 0.0)
    throw Error("Spin: J must be a nonnegative half-integer, got " + std::to_string(j));
  return Spin(static_cast<int>(rounded));
}

std::string Spin::label() const {
  if (twice_ % 2 == 0) return std::to_string(twice_ / 2);
  return std::to_string(twice_) + "/2";
}

std::vector<CMatrix> LieRepresentation::hermitian_ops() const {
  std::vector<CMatrix> out;
  out.reserve(hermitian_basis.size());
  for (const auto& h : hermitian_basis) out.push_back(h.op);
  return out;
}

const CMatrix& LieRepresentation::op(const std::string& label) const {
  for (const auto& b : basis)
    if (b.label == label) return b.op;
  for (const auto& b : hermitian_basis)
    if (b.label == label) return b.op;
  throw Error("representation " + name + " has no operator named '" + label + "'");
}

RMatrix trace_gram(const std::vector<CMatrix>& ops) {
  const auto n = static_cast<Eigen::Index>(ops.size());
  RMatrix g(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = j; k < n; ++k) {
      const auto& a = ops[static_cast<std::size_t>(j)];
      const auto& b = ops[static_cast<std::size_t>(k)];
      const double v = (a.cwiseProduct(b.transpose())).sum().real() / static_cast<double>(a.rows());
      g(j, k) = v;
      g(k, j) = v;
    }
  return g;
}

LieRepresentation spin_rep(Spin j) {
  if (j.twice() < 1) throw Error("spin_rep: J must be at least 1/2");
  const int d = j.multiplet_dim();
  const double jv = j.value();
  CMatrix jp = CMatrix::Zero(d, d);
  CMatrix jz = CMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    const double m = jv - k;
    jz(k, k) = m;
    if (k > 0) jp(k - 1, k) = std::sqrt(spin_dim_value(jv) - m * (m + 1.0));
  }
  const CMatrix jm = jp.adjoint();
  const CMatrix jx = 0.5 * (jp + jm);
  const CMatrix jy = (jp - jm) / (2.0 * kI);

  LieRepresentation rep;
  rep.name = "su2-spinJ";
  rep.kind = AlgebraKind::Su2Irrep;
  rep.dim = d;
  rep.spin = j;
  rep.basis = {{"Jx", jx}, {"Jy", jy}, {"Jz", jz}, {"Jp", jp}, {"Jm", jm}};
  rep.hermitian_basis = {{"Jx", jx}, {"Jy", jy}, {"Jz", jz}};
  rep.raising = {jp};
  rep.highest_weight_vector = PureState::basis(d, 0);
  rep.guarded = all_indices(d);
  rep.normalized = true;
  finish(rep);
  return rep;
}

LieRepresentation spin_rep(double j) { return spin_rep(Spin::from_value(j)); }

CMatrix annihilation(int cutoff) {
  const int d = cutoff + 1;
  CMatrix a = CMatrix::Zero(d, d);
  for (int k = 1; k < d; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

CMatrix annihilation(int cutoff, int modes, int mode) {
  if (mode < 0 || mode >= modes) throw Error("annihilation: mode index out of range");
  std::vector<CMatrix> factors(static_cast<std::size_t>(modes), identity(cutoff + 1));
  factors[static_cast<std::size_t>(mode)] = annihilation(cutoff);
  return kron_all(factors);
}

namespace {

std::vector<Eigen::Index> boson_guard(int cutoff, int modes, int guard_levels) {
  const Eigen::Index levels = cutoff + 1;
  Eigen::Index dim = 1;
  for (int m = 0; m < modes; ++m) dim *= levels;
  std::vector<Eigen::Index> idx;
  for (Eigen::Index s = 0; s < dim; ++s) {
    Eigen::Index rest = s;
    bool ok = true;
    for (int m = 0; m < modes; ++m) {
      if (rest % levels > cutoff - guard_levels) ok = false;
      rest /= levels;
    }
    if (ok) idx.push_back(s);
  }
  return idx;
}

}  // namespace

LieRepresentation boson_rep(int cutoff, int modes) {
  if (cutoff < 4) throw Error("boson_rep: cutoff must be at least 4");
  if (modes < 1) throw Error("boson_rep: need at least one mode");
  LieRepresentation rep;
  rep.name = "h3-boson";
  rep.kind = AlgebraKind::Heisenberg;
  rep.cutoff = cutoff;
  rep.modes = modes;
  Eigen::Index dim = 1;
  for (int m = 0; m < modes; ++m) dim *= cutoff + 1;
  rep.dim = dim;
  rep.basis.push_back({"I", identity(dim)});
  const double r2 = std::sqrt(2.0);
  for (int m = 0; m < modes; ++m) {
    const CMatrix a = annihilation(cutoff, modes, m);
    const CMatrix ad = a.adjoint();
    const std::string s = mode_suffix(modes, m);
    rep.basis.push_back({"a" + s, a});
    rep.basis.push_back({"adag" + s, ad});
    rep.hermitian_basis.push_back({"x" + s, (a + ad) / r2});
    rep.hermitian_basis.push_back({"p" + s, -kI * (a - ad) / r2});
    rep.raising.push_back(a);
  }
  rep.highest_weight_vector = PureState::basis(dim, 0);
  rep.guarded = boson_guard(cutoff, modes, default_policy().guard_levels);
  rep.normalized = true;
  finish(rep);
  return rep;
}

LieRepresentation squeeze_rep(int cutoff) {
  if (cutoff < 6) throw Error("squeeze_rep: cutoff must be at least 6");
  LieRepresentation rep;
  rep.name = "h6-squeeze";
  rep.kind = AlgebraKind::Squeeze;
  rep.cutoff = cutoff;
  rep.dim = cutoff + 1;
  const CMatrix a = annihilation(cutoff);
  const CMatrix ad = a.adjoint();
  const CMatrix a2 = a * a;
  const CMatrix ad2 = ad * ad;
  const CMatrix k0 = ad * a + 0.5 * identity(rep.dim);
  const double r2 = std::sqrt(2.0);
  rep.basis = {{"I", identity(rep.dim)}, {"a", a},     {"adag", ad},
               {"a2", a2},               {"adag2", ad2}, {"K0", k0}};
  rep.hermitian_basis = {{"x", (a + ad) / r2},
                         {"p", -kI * (a - ad) / r2},
                         {"K1", 0.5 * (a2 + ad2)},
                         {"K2", 0.5 * kI * (ad2 - a2)},
                         {"K0", k0}};
  rep.raising = {a};
  rep.highest_weight_vector = PureState::basis(rep.dim, 0);
  rep.guarded = boson_guard(cutoff, 1, default_policy().guard_levels);
  finish(rep);
  return rep;
}

LieRepresentation collective_spin_rep(int n_spins) {
  if (n_spins < 1 || n_spins > 8) throw Error("collective_spin_rep: N must be in [1, 8]");
  const std::array<CMatrix, 3> single{pauli::x() / 2.0, pauli::y() / 2.0, pauli::z() / 2.0};
  const Eigen::Index dim = Eigen::Index{1} << n_spins;
  std::array<CMatrix, 3> total;
  for (int a = 0; a < 3; ++a) {
    total[a] = CMatrix::Zero(dim, dim);
    for (int i = 0; i < n_spins; ++i) {
      std::vector<CMatrix> f(static_cast<std::size_t>(n_spins), identity(2));
      f[static_cast<std::size_t>(i)] = single[a];
      total[a] += kron_all(f);
    }
  }
  const CMatrix jp = total[0] + kI * total[1];
  LieRepresentation rep;
  rep.name = "su2-collective-" + std::to_string(n_spins);
  rep.kind = AlgebraKind::Su2Collective;
  rep.n_spins = n_spins;
  rep.dim = dim;
  rep.basis = {{"Jx", total[0]}, {"Jy", total[1]}, {"Jz", total[2]}, {"Jp", jp}, {"Jm", jp.adjoint()}};
  rep.hermitian_basis = {{"Jx", total[0]}, {"Jy", total[1]}, {"Jz", total[2]}};
  rep.raising = {jp};
  rep.highest_weight_vector = PureState::basis(dim, 0);
  rep.guarded = all_indices(dim);
  rep.normalized = true;
  finish(rep);
  return rep;
}

LieRepresentation make_representation(const nlohmann::json& spec) {
  if (!spec.is_object() || !spec.contains("name"))
    throw Error("representation spec needs a \"name\" field");
  const std::string name = spec.at("name").get<std::string>();
  const nlohmann::json params = spec.value("parameters", nlohmann::json::object());
  auto need = [&](const char* key) -> const nlohmann::json& {
    if (!params.contains(key)) throw Error("representation " + name + " needs parameter " + key);
    return params.at(key);
  };
  if (name == "su2-spinJ") return spin_rep(need("J").get<double>());
  if (name == "h3-boson") return boson_rep(need("cutoff").get<int>(), params.value("modes", 1));
  if (name == "h6-squeeze") return squeeze_rep(need("cutoff").get<int>());
  if (name.rfind("su2-collective", 0) == 0) {
    if (params.contains("N")) return collective_spin_rep(params.at("N").get<int>());
    const auto dash = name.find_last_of('-');
    if (dash != std::string::npos && dash + 1 < name.size() && name.substr(dash + 1) != "N")
      return collective_spin_rep(std::stoi(name.substr(dash + 1)));
    throw Error("representation " + name + " needs parameter N");
  }
  throw Error("unknown representation name '" + name + "'");
}

LieRepresentation make_representation(const std::string& spec) {
  const auto first = spec.find_first_not_of(" \t\n");
  if (first != std::string::npos && spec[first] == '{')
    return make_representation(nlohmann::json::parse(spec));
  nlohmann::json j;
  const auto colon = spec.find(':');
  j["name"] = spec.substr(0, colon);
  j["parameters"] = nlohmann::json::object();
  if (colon != std::string::npos) {
    std::stringstream ss(spec.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw Error("malformed representation parameter '" + item + "'");
      const std::string key = item.substr(0, eq);
      const std::string val = item.substr(eq + 1);
      // Accept "J=3/2" as well as decimals.
      const auto slash = val.find('/');
      double v = 0.0;
      try {
        v = slash == std::string::npos ? std::stod(val)
                                       : std::stod(val.substr(0, slash)) / std::stod(val.substr(slash + 1));
      } catch (const std::exception&) {
        throw Error("malformed representation parameter '" + item + "'");
      }
      if (key == "J") j["parameters"][key] = v;
      else j["parameters"][key] = static_cast<int>(std::lround(v));
    }
  }
  return make_representation(j);
}

double closure_residual(const LieRepresentation& rep) {
  const auto& idx = rep.guarded;
  const auto g = static_cast<Eigen::Index>(idx.size());
  const auto m = static_cast<Eigen::Index>(rep.basis.size());
  CMatrix b(g * g, m);
  std::vector<CMatrix> restricted;
  for (Eigen::Index k = 0; k < m; ++k) {
    const CMatrix r = restrict_to(rep.basis[static_cast<std::size_t>(k)].op, idx);
    b.col(k) = r.reshaped();
  }
  const Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(b);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const auto& bi = rep.basis[static_cast<std::size_t>(i)].op;
      const auto& bj = rep.basis[static_cast<std::size_t>(j)].op;
      const CVector c = restrict_to(commutator(bi, bj), idx).reshaped();
      const double cn = c.norm();
      const double floor = 1e-12 * bi.norm() * bj.norm();
      if (cn <= floor) continue;
      const CVector coef = cod.solve(c);
      worst = std::max(worst, (c - b * coef).norm() / cn);
    }
  return worst;
}

double highest_weight_residual(const LieRepresentation& rep) {
  double worst = 0.0;
  for (const auto& r : rep.raising)
    worst = std::max(worst, (r * rep.highest_weight_vector.amplitudes()).norm());
  return worst;
}

LieRepresentation orthonormalize_basis(const LieRepresentation& rep) {
  if (rep.kind == AlgebraKind::Squeeze)
    throw Error("orthonormalize_basis: the squeeze algebra is not compact; no invariant normalization");
  const auto ops = rep.hermitian_ops();
  for (const auto& x : ops) require_hermitian(x, "orthonormalize_basis");
  const RMatrix g = trace_gram(ops);
  const Eigen::SelfAdjointEigenSolver<RMatrix> es(g);
  const RVector& ev = es.eigenvalues();
  if (ev.size() == 0 || ev.maxCoeff() <= 0.0 || ev.minCoeff() <= 1e-12 * ev.maxCoeff())
    throw Error("orthonormalize_basis: degenerate Gram matrix");
  // Symmetric (Loewdin) orthonormalization keeps an already orthogonal basis in place.
  const RMatrix inv_sqrt = es.eigenvectors() * ev.cwiseInverse().cwiseSqrt().asDiagonal() *
                           es.eigenvectors().transpose();
  const auto n = static_cast<Eigen::Index>(ops.size());
  std::vector<CMatrix> y(ops.size(), CMatrix::Zero(rep.dim, rep.dim));
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k)
      y[static_cast<std::size_t>(j)] += inv_sqrt(k, j) * ops[static_cast<std::size_t>(k)];

  double scale = 1.0;
  const double dimd = static_cast<double>(rep.dim);
  if (rep.kind == AlgebraKind::Su2Irrep || rep.kind == AlgebraKind::Su2Collective) {
    // Killing form K(Y_j, Y_j) = tr(ad_j ad_j); bare J_a have K = 2.
    double killing = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      CMatrix ad(n, n);
      for (Eigen::Index k = 0; k < n; ++k) {
        const CMatrix c = commutator(y[static_cast<std::size_t>(j)], y[static_cast<std::size_t>(k)]);
        for (Eigen::Index l = 0; l < n; ++l)
          ad(l, k) = (y[static_cast<std::size_t>(l)].cwiseProduct(c.transpose())).sum() / dimd;
      }
      killing += (ad * ad).trace().real();
    }
    killing /= static_cast<double>(n);
    if (killing <= 0.0) throw Error("orthonormalize_basis: Killing form not positive");
    scale = std::sqrt(2.0 / killing);
  } else {
    // Canonical quadratures: |<Lambda|[Y_0, Y_1]|Lambda>| = 1.
    if (n < 2) throw Error("orthonormalize_basis: oscillator basis needs a quadrature pair");
    const cplx c = expectation(rep.highest_weight_vector, commutator(y[0], y[1]));
    if (std::abs(c) <= 0.0) throw Error("orthonormalize_basis: quadratures commute at reference");
    scale = 1.0 / std::sqrt(std::abs(c));
  }

  LieRepresentation out = rep;
  for (Eigen::Index j = 0; j < n; ++j) {
    CMatrix h = scale * y[static_cast<std::size_t>(j)];
    out.hermitian_basis[static_cast<std::size_t>(j)].op = 0.5 * (h + h.adjoint());
  }
  out.normalized = true;
  finish(out);
  return out;
}

bool WclCertificate::all_passed() const {
  for (bool p : passed)
    if (!p) return false;
  return true;
}

WclCertificate wcl_check(const CMatrix& hamiltonian, const std::vector<CMatrix>& lindblads,
                         const NumericPolicy& policy) {
  require_hermitian(hamiltonian, "wcl_check");
  WclCertificate cert;
  for (const auto& l : lindblads) {
    if (l.rows() != hamiltonian.rows() || l.cols() != hamiltonian.cols())
      throw DimensionError("wcl_check: dimension mismatch");
    const double ln2 = l.squaredNorm();
    if (ln2 == 0.0) throw Error("wcl_check: zero Lindblad operator");
    const CMatrix c = commutator(hamiltonian, l);
    const double lambda = (l.conjugate().cwiseProduct(c)).sum().real() / ln2;
    const double residual = (c - lambda * l).norm() / std::sqrt(ln2);
    cert.lambdas.push_back(lambda);
    cert.residuals.push_back(residual);
    cert.passed.push_back(residual <= policy.wcl_residual);
  }
  return cert;
}

}  // namespace gcsieve
