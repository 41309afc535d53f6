// Acceptance suite: one PASS/FAIL line per criterion. Every tolerance below is
// fixed here and not read from any config file.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "gcsieve/gcs.hpp"
#include "gcsieve/model_io.hpp"
#include "gcsieve/report.hpp"
#include "gcsieve/scenarios.hpp"
#include "gcsieve/sieve.hpp"
#include "gcsieve/structure.hpp"
#include "gcsieve/uncertainty.hpp"

using namespace gcsieve;
using json = nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, const std::string& title, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  std::cout << "criterion " << id << " [" << title << "]: " << (ok ? "PASS" : "FAIL") << "  " << detail << std::endl;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

CMatrix random_matrix(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

SieveOptions boson_search(const LieRepresentation& rep, int starts, std::uint64_t seed, bool classify) {
  SieveOptions o;
  o.n_starts = starts;
  o.seed = seed;
  o.domain = guarded_domain(rep);
  o.start_support = boson_start_support(rep);
  if (classify) o.manifold = make_manifold(rep);
  return o;
}

double worst_infidelity(const SieveReport& r) {
  double w = 0.0;
  for (const auto& m : r.minimizers) w = std::max(w, m.gcs_infidelity);
  return w;
}

// ---------------------------------------------------------------------------

void criterion1() {
  double verify_secs = 0.0;
  double probe_secs = 0.0;
  bool ok = true;
  std::string detail;
  for (int twice : {1, 2, 3, 4}) {
    const auto t0 = Clock::now();
    const auto rep = spin_rep(Spin::from_twice(twice));
    const double j = 0.5 * twice;
    Theorem1Options o;
    o.bound_slack = 1e-9;
    o.attainment = {{1e-3, 1e-2}};
    const auto r = verify_theorem1(rep, 10000, 20240101, o);
    const double at_hw = invariant_uncertainty(rep.highest_weight_vector, rep);
    const auto& att = r.attainment.front();
    verify_secs += seconds_since(t0);

    // Haar samples rarely come near the bound for larger J, so also probe
    // coherent states pushed off the manifold by random kicks of varying size.
    const auto t1 = Clock::now();
    const auto manifold = make_manifold(rep);
    std::mt19937_64 rng(1000 + twice);
    std::uniform_real_distribution<double> log_eps(std::log(1e-4), std::log(0.3));
    int near = att.count;
    double worst_near = att.worst_infidelity;
    double min_probe = std::numeric_limits<double>::infinity();
    for (const auto& g : sample_gcs(manifold, 100, 77 + twice)) {
      const CVector kick = haar_random_state(rep.dim, rng).amplitudes();
      const auto probe = PureState::normalized(g.amplitudes() + std::exp(log_eps(rng)) * kick);
      const double u = invariant_uncertainty(probe, rep);
      min_probe = std::min(min_probe, u);
      if (u > j + 1e-3) continue;
      ++near;
      worst_near = std::max(worst_near, gcs_distance(probe, manifold).infidelity);
    }
    probe_secs += seconds_since(t1);
    const bool this_ok = r.min_over_random >= j - 1e-9 && min_probe >= j - 1e-9 && std::abs(at_hw - j) <= 1e-10 &&
                         near > 0 && worst_near <= 1e-2;
    ok = ok && this_ok;
    detail += "J=" + rep.spin->label() + ": min " + fmt(std::min(r.min_over_random, min_probe)) + ", near-bound " +
              std::to_string(near) + " worst inf " + fmt(worst_near) + "; ";
  }
  ok = ok && verify_secs < 30.0;
  report(1, "invariant uncertainty bound, su(2)", ok,
         detail + "10^4-state verification " + fmt(verify_secs) + " s (< 30), near-bound probes " + fmt(probe_secs) +
             " s");
}

void criterion2() {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> dim_pick(2, 12);
  std::uniform_int_distribution<int> ops_pick(1, 3);
  double worst = 0.0;
  const int pairs = 60;
  for (int k = 0; k < pairs; ++k) {
    const Eigen::Index dim = dim_pick(rng);
    const CMatrix h = random_matrix(dim, rng);
    std::vector<CMatrix> ls;
    for (int l = 0, n = ops_pick(rng); l < n; ++l)
      ls.push_back(random_matrix(dim, rng) / std::sqrt(static_cast<double>(dim)));
    const auto model = make_model(0.5 * (h + h.adjoint()), ls);
    const auto psi = haar_random_state(dim, rng);
    const Propagator prop(model);
    const double step = 1e-5 / prop.generator().operatorNorm();
    const CVector rho0 = DensityMatrix::from_pure(psi).matrix().reshaped();
    auto purity = [&](double t) {
      const CVector v = prop.step_map(t) * rho0;
      const CMatrix rho = v.reshaped(dim, dim);
      return (rho * rho).trace().real();
    };
    const double fd = -(purity(step) - purity(-step)) / (2.0 * step);
    const double formula = purity_rate(psi, model);
    worst = std::max(worst, std::abs(fd - formula) / std::abs(formula));
  }
  report(2, "purity-rate formula vs finite differences", worst <= 1e-6,
         std::to_string(pairs) + " pairs, dims 2..12, worst relative error " + fmt(worst) + " (<= 1e-6)");
}

void criterion3() {
  const auto t0 = Clock::now();
  // Single damped mode.
  const int nc = 30;
  const double gamma = 1.0;
  const auto rep = boson_rep(nc);
  const CMatrix& a = rep.op("a");
  const auto single = make_model(a.adjoint() * a + 0.5 * identity(rep.dim), {std::sqrt(gamma) * a}, {"a"}, true);
  const auto r = sieve_search(single, boson_search(rep, 32, 7, true), "single");
  const double worst_ccs = worst_infidelity(r);

  // Two degenerate modes damped through a1 + a2.
  const int nc2 = 10;
  const auto rep2 = boson_rep(nc2, 2);
  const CMatrix& a1 = rep2.op("a1");
  const CMatrix& a2 = rep2.op("a2");
  const CMatrix h2 = a1.adjoint() * a1 + a2.adjoint() * a2 + identity(rep2.dim);
  const auto deg = make_model(h2, {a1 + a2}, {"a1+a2"}, true);
  double ccs_rate = 0.0;
  int used = 0;
  for (const auto& s : sample_gcs(make_manifold(rep2), 64, 9)) {
    double kept = 0.0;
    for (const auto k : rep2.guarded) kept += std::norm(s[k]);
    if (used == 8 || 1.0 - kept > 1e-8) continue;
    ccs_rate = std::max(ccs_rate, purity_rate(s, deg));
    ++used;
  }
  const double lam = std::tanh(0.3);
  CVector tmss = CVector::Zero(rep2.dim);
  for (int n = 0; n <= nc2 - 2; ++n) tmss(n * (nc2 + 1) + n) = std::pow(lam, n);
  const double probe = purity_rate(PureState::normalized(tmss), deg);
  const double margin = probe - ccs_rate;
  const double secs = seconds_since(t0);

  const bool ok = used > 0 && r.global_min_value <= 1e-8 && worst_ccs <= 1e-4 && margin > 0.0 && secs < 300.0;
  report(3, "coherent states as pointer states, damped modes", ok,
         "single mode: min " + fmt(r.global_min_value) + " (<= 1e-8), worst CCS infidelity " + fmt(worst_ccs) +
             " over " + std::to_string(r.minimizers.size()) + " minimizers (<= 1e-4); degenerate: squeezed probe " +
             fmt(probe) + " - CCS " + fmt(ccs_rate) + " = margin " + fmt(margin) + " (> 0); runtime " + fmt(secs) +
             " s (< 300)");
}

void criterion4() {
  const auto rep = spin_rep(1.0);
  const cplx lambda = 1.0;
  std::vector<CMatrix> ls;
  for (const auto& x : rep.hermitian_basis) ls.push_back(lambda * x.op);
  const auto balanced = make_model(CMatrix::Zero(3, 3), ls);
  const double expected = 2.0 * std::norm(lambda);
  double worst_ratio = 0.0;
  for (const auto& s : haar_random_states(3, 100, 3))
    worst_ratio = std::max(worst_ratio, std::abs(purity_rate(s, balanced) / invariant_uncertainty(s, rep) - expected));
  SieveOptions o;
  o.n_starts = 32;
  o.seed = 3;
  o.manifold = make_manifold(rep);
  const auto rb = sieve_search(balanced, o, "balanced");
  const double worst_gcs = worst_infidelity(rb);

  const auto counter = make_model(CMatrix::Zero(3, 3), {rep.op("Jz")}, {"Jz"});
  const auto rc = sieve_search(counter, o, "Jz");
  double witness_inf = 0.0;
  double witness_value = 1.0;
  for (const auto& m : rc.minimizers)
    if (m.value <= 1e-10 && m.gcs_infidelity > witness_inf) {
      witness_inf = m.gcs_infidelity;
      witness_value = m.value;
    }
  const bool ok = worst_ratio <= 1e-10 && worst_gcs <= 1e-4 && witness_inf >= 0.4 && witness_value <= 1e-10;
  report(4, "symmetric dissipation, spin 1", ok,
         "max |rate/(dI)^2 - 2|lambda|^2| " + fmt(worst_ratio) + " (<= 1e-10); worst minimizer GCS infidelity " +
             fmt(worst_gcs) + " (<= 1e-4); L = Jz witness infidelity " + fmt(witness_inf) + " (>= 0.4) at rate " +
             fmt(witness_value) + " (= 0)");
}

const Check* find_check(const Verdict& v, const std::string& prefix) {
  for (const auto& c : v.checks)
    if (c.name.rfind(prefix, 0) == 0) return &c;
  return nullptr;
}

void criterion5() {
  const json cfg = {
      {"seed", 5},
      {"n_starts", 16},
      {"n_random", 100},
      {"gamma1", 1.0},
      {"omega", 1.0},
      {"sigma_pm", "trace_normalized"},
      {"nbar_grid", {0.1, 1.0, 10.0, 100.0}},
      {"cases",
       {{{"nbar", 100.0}, {"gamma2", 100.0}, {"expect_proportional", true}},
        {{"nbar", 0.0}, {"gamma2", 1.0}, {"expect_proportional", false}}}},
      {"trajectory", {{"nbar", 100.0}, {"gamma2", 100.0}, {"high_temperature_limit", true}, {"t_max", 0.5},
                      {"steps", 200}, {"n_states", 4}}},
      {"thresholds",
       {{"ratio_spread", 0.01},
        {"ratio_spread_fail", 0.1},
        {"gcs_infidelity", 1e-6},
        {"ground_infidelity", 1e-6},
        {"tie_rel", 1e-6},
        {"monotone_slack", 1e-12},
        {"steady_purity", 1e-6}}}};
  const auto r = run_scenario("qome", cfg);
  const auto* hot = find_check(r.verdict, "nbar=100 gamma2=100: ratio spread");
  const auto* cold = find_check(r.verdict, "nbar=0 gamma2=1: ratio spread");
  const auto* ground = find_check(r.verdict, "nbar=0 gamma2=1: infidelity of every global minimizer");
  const auto* rise = find_check(r.verdict, "balanced high-T: largest purity increase");
  const auto* final_gap = find_check(r.verdict, "balanced high-T: |final purity");
  const bool found = hot && cold && ground && rise && final_gap;
  const bool ok = found && hot->passed && cold->passed && ground->passed && rise->passed && final_gap->passed;
  report(5, "damped two-level atom with dephasing", ok,
         found ? "nbar=100, gamma2=nbar*gamma1: spread " + fmt(hot->value) + " (<= 0.01); nbar=0: spread " +
                     fmt(cold->value) + " (> 0.1), ground-state infidelity " + fmt(ground->value) +
                     " (<= 1e-6); high-T trajectories: max purity rise " + fmt(rise->value) + ", |P - 1/2| " +
                     fmt(final_gap->value) + " (<= 1e-6)"
               : "expected checks missing from verdict");
}

void criterion6() {
  const int nc = 40;
  const cplx c = 1.0, d = 0.5;
  const double omega = 1.0;
  const auto rep = boson_rep(nc);
  const CMatrix& a = rep.op("a");
  const auto model = brownian_model(c, d, omega, nc);
  const std::vector<double> ts{0.0, 0.3, 0.7, 1.1, 1.9};
  const auto resolved = time_resolved_sieve(model, ts, boson_search(rep, 8, 11, false));
  double worst_qv = 0.0;
  double worst_r = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const auto& best = resolved[k].minimizers.front();
    worst_qv = std::max(worst_qv, quasivariance(best.state, first_order_lindblad_t(model, ts[k]).front()));
    worst_r = std::max(worst_r, std::abs(std::abs(squeezing_parameter(best.state, a)) - 0.5));
  }
  const auto avg = sieve_search(SieveObjective::first_order_average(model, 2.0 * std::numbers::pi / omega),
                                boson_search(rep, 16, 11, true), "average");
  const double avg_inf = worst_infidelity(avg);
  const bool ok = worst_qv <= 1e-6 && worst_r <= 1e-3 && avg_inf <= 1e-3;
  report(6, "quantum Brownian motion", ok,
         "5 times: worst quasivariance " + fmt(worst_qv) + " (<= 1e-6), worst |tanh r - 0.5| " + fmt(worst_r) +
             " (<= 1e-3); period average: worst CCS infidelity " + fmt(avg_inf) + " (<= 1e-3)");
}

void criterion7() {
  const auto t0 = Clock::now();
  const auto rep = collective_spin_rep(4);
  const auto dec = decompose(rep);
  const bool mult_ok = dec.blocks.size() == 3 && dec.block(Spin::from_twice(4)).multiplicity == 1 &&
                       dec.block(Spin::from_twice(2)).multiplicity == 3 &&
                       dec.block(Spin::from_twice(0)).multiplicity == 2;
  const auto model = make_model(CMatrix::Zero(rep.dim, rep.dim), rep.hermitian_ops(), {"Jx", "Jy", "Jz"});
  const CMatrix dfs = dfs_extract(model);
  double dfs_unc = 0.0;
  for (Eigen::Index k = 0; k < dfs.cols(); ++k)
    dfs_unc = std::max(dfs_unc, invariant_uncertainty(PureState::normalized(dfs.col(k)), rep));
  std::mt19937_64 rng(4);
  for (int k = 0; k < 20; ++k)
    dfs_unc = std::max(dfs_unc, invariant_uncertainty(
                                    PureState::normalized(dfs * haar_random_state(dfs.cols(), rng).amplitudes()), rep));
  const auto h1 = min_uncertainty_in_subspace(rep, dec.block(Spin::from_twice(2)).isometry, 32, 4);

  // Stationarity at gamma t = 5 (unit rates).
  Propagator prop(model);
  double stat = 0.0;
  for (Eigen::Index k = 0; k < dfs.cols(); ++k) {
    const auto psi = PureState::normalized(dfs.col(k));
    const auto rho = prop.evolve(DensityMatrix::from_pure(psi), {5.0}).front();
    stat = std::max(stat, 1.0 - expectation(psi, rho.matrix()).real());
  }
  const double secs = seconds_since(t0);
  const bool ok = mult_ok && dfs.cols() == 2 && dfs_unc <= 1e-10 && std::abs(h1.value - 1.0) <= 1e-6 &&
                  stat <= 1e-8 && secs < 120.0;
  report(7, "four-spin DFS and noiseless subsystem", ok,
         std::string("multiplicities (2:1, 1:3, 0:2) ") + (mult_ok ? "exact" : "WRONG") + "; DFS dim " +
             std::to_string(dfs.cols()) + " (= 2); max (dI)^2 on DFS " + fmt(dfs_unc) +
             " (<= 1e-10); min (dI)^2 on triplets " + fmt(h1.value) + " (1 +- 1e-6); DFS infidelity at t=5 " +
             fmt(stat) + " (<= 1e-8); runtime " + fmt(secs) + " s (< 120)");
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion8() {
  // The two slow scenarios (theorem2, squeezing) run through the same seeded sieve
  // path and are exercised once each by the CLI tests.
  const std::filesystem::path configs = std::filesystem::path(GCSIEVE_SOURCE_DIR) / "configs";
  const auto scratch = std::filesystem::temp_directory_path() / "gcsieve_acceptance";
  bool ok = true;
  std::string detail;
  for (const std::string id : {"theorem1", "theorem3", "qome", "dfs_ns"}) {
    const json cfg = load_json(configs / (id + ".json"));
    std::string bytes[2];
    for (int run = 0; run < 2; ++run) {
      const auto dir = scratch / (id + "_" + std::to_string(run));
      std::filesystem::remove_all(dir);
      write_outputs(run_scenario(id, cfg, run + 1), dir);
      bytes[run] = slurp(dir / "verdict.json");
    }
    const bool same = !bytes[0].empty() && bytes[0] == bytes[1];
    ok = ok && same;
    detail += id + " " + (same ? "identical" : "DIFFERENT") + " (" + std::to_string(bytes[0].size()) + " bytes); ";
  }
  report(8, "deterministic verdict.json", ok, detail + "second run uses 2 threads");
}

}  // namespace

int main() {
  try {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
  } catch (const std::exception& e) {
    std::cout << "acceptance aborted: " << e.what() << std::endl;
    return 1;
  }
  std::cout << (failures == 0 ? "all criteria PASS" : std::to_string(failures) + " criteria FAIL") << std::endl;
  return failures == 0 ? 0 : 1;
}
