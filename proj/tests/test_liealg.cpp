#include <doctest.h>

#include "gcsieve/liealg.hpp"

using namespace gcsieve;

namespace {

// Top-left block over Fock levels 0..k_max of a single-mode operator.
CMatrix low_block(const CMatrix& m, int k_max) { return m.topLeftCorner(k_max + 1, k_max + 1); }

}  // namespace

TEST_SUITE("liealg") {

TEST_CASE("spin irreps close under commutation and have the right Casimir") {
  for (int twice : {1, 2, 3, 4}) {
    const auto rep = spin_rep(Spin::from_twice(twice));
    const double j = 0.5 * twice;
    CAPTURE(j);
    CHECK(rep.dim == twice + 1);
    const CMatrix& jx = rep.op("Jx");
    const CMatrix& jy = rep.op("Jy");
    const CMatrix& jz = rep.op("Jz");
    CHECK((commutator(jx, jy) - kI * jz).norm() <= 1e-12);
    CHECK((commutator(jy, jz) - kI * jx).norm() <= 1e-12);
    CHECK((rep.casimir - j * (j + 1.0) * identity(rep.dim)).norm() <= 1e-12);
    CHECK(closure_residual(rep) <= 1e-12);
    CHECK(highest_weight_residual(rep) <= 1e-12);
    // Highest weight: Jz eigenvalue J.
    CHECK(expectation(rep.highest_weight_vector, jz).real() == doctest::Approx(j));
  }
}

TEST_CASE("half-integer spins are exact and invalid ones are rejected") {
  CHECK(Spin::from_value(1.5).twice() == 3);
  CHECK(Spin::from_value(2.0).label() == "2");
  CHECK_THROWS_AS((void)Spin::from_value(0.3), Error);
  CHECK_THROWS_AS((void)Spin::from_value(-1.0), Error);
}

TEST_CASE("truncated bosons obey the canonical commutator below the cutoff") {
  const int nc = 12;
  const auto rep = boson_rep(nc);
  CHECK(rep.dim == nc + 1);
  const CMatrix& a = rep.op("a");
  const CMatrix c = commutator(a, a.adjoint());
  CHECK((low_block(c, nc - 1) - identity(nc)).norm() <= 1e-12);
  // The top level is where truncation shows.
  CHECK(std::abs(c(nc, nc) - cplx(-nc)) <= 1e-12);
  CHECK(closure_residual(rep) <= 1e-12);
  CHECK(highest_weight_residual(rep) <= 1e-12);
  CHECK(rep.guarded.size() == static_cast<std::size_t>(nc - 1));
}

TEST_CASE("two-mode bosons act on separate tensor factors") {
  const auto rep = boson_rep(5, 2);
  CHECK(rep.dim == 36);
  CHECK(commutator(rep.op("a1"), rep.op("a2")).norm() <= 1e-12);
  CHECK(commutator(rep.op("a1"), rep.op("adag2")).norm() <= 1e-12);
  CHECK_THROWS_AS((void)boson_rep(3), Error);
}

TEST_CASE("squeeze algebra commutator on the guarded subspace") {
  const int nc = 14;
  const auto rep = squeeze_rep(nc);
  const CMatrix& a = rep.op("a");
  const CMatrix n = a.adjoint() * a;
  const CMatrix lhs = commutator(rep.op("a2"), rep.op("adag2"));
  const CMatrix rhs = 4.0 * n + 2.0 * identity(rep.dim);
  CHECK((low_block(lhs, nc - 2) - low_block(rhs, nc - 2)).norm() <= 1e-10);
}

TEST_CASE("squeezing the vacuum populates only even Fock levels") {
  const auto rep = squeeze_rep(20);
  const cplx xi(0.2, 0.1);
  const CMatrix gen = std::conj(xi) * rep.op("a2") - xi * rep.op("adag2");
  const CVector v = mat_exp(gen) * rep.highest_weight_vector.amplitudes();
  double odd = 0.0;
  for (Eigen::Index k = 1; k < v.size(); k += 2) odd += std::norm(v(k));
  CHECK(odd <= 1e-28);
  CHECK(std::norm(v(2)) > 1e-3);
}

TEST_CASE("collective spins decompose as the sum of single-spin operators") {
  const auto rep = collective_spin_rep(3);
  CHECK(rep.dim == 8);
  CHECK((commutator(rep.op("Jx"), rep.op("Jy")) - kI * rep.op("Jz")).norm() <= 1e-12);
  // |up up up> is the j = 3/2 highest weight.
  CHECK(expectation(rep.highest_weight_vector, rep.op("Jz")).real() == doctest::Approx(1.5));
  CHECK_THROWS_AS((void)collective_spin_rep(0), Error);
}

TEST_CASE("weak-coupling certificate finds the Bohr frequency") {
  const double omega = 1.3;
  const auto rep = boson_rep(10);
  const CMatrix& a = rep.op("a");
  const CMatrix h = omega * a.adjoint() * a;
  const auto cert = wcl_check(h, {a, a * a, a.adjoint()});
  REQUIRE(cert.lambdas.size() == 3);
  CHECK(cert.lambdas[0] == doctest::Approx(-omega));
  CHECK(cert.lambdas[1] == doctest::Approx(-2.0 * omega));
  CHECK(cert.lambdas[2] == doctest::Approx(omega));
  CHECK(cert.all_passed());
  // sigma_x is not an eigenoperator of sigma_z.
  const auto bad = wcl_check(pauli::z(), {pauli::x()});
  CHECK_FALSE(bad.all_passed());
}

TEST_CASE("representations load from text and JSON specs") {
  CHECK(make_representation("su2-spinJ:J=3/2").dim == 4);
  CHECK(make_representation("h3-boson:cutoff=8,modes=2").dim == 81);
  CHECK(make_representation("su2-collective-4").dim == 16);
  CHECK(make_representation(nlohmann::json{{"name", "h6-squeeze"}, {"parameters", {{"cutoff", 10}}}}).dim == 11);
  CHECK_THROWS_AS((void)make_representation("su2-spinJ"), Error);
  CHECK_THROWS_AS((void)make_representation("su2-spinJ:J=x"), Error);
  CHECK_THROWS_AS((void)make_representation("so3:J=1"), Error);
}

TEST_CASE("spin Hermitian basis is orthogonal under the trace form") {
  const auto rep = spin_rep(1.0);
  const RMatrix g = trace_gram(rep.hermitian_ops());
  CHECK(std::abs(g(0, 1)) <= 1e-14);
  CHECK(g(0, 0) == doctest::Approx(g(2, 2)));
}

}  // TEST_SUITE
