#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <doctest.h>

#include "gcsieve/report.hpp"
#include "gcsieve/scenarios.hpp"

using namespace gcsieve;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = fs::path(GCSIEVE_SOURCE_DIR) / "configs";

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "gcsieve_scenarios" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "gcsieve");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  auto* old_out = std::cout.rdbuf(out.rdbuf());
  auto* old_err = std::cerr.rdbuf(err.rdbuf());
  const int code = run_cli(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_SUITE("scenarios") {

TEST_CASE("theorem3 runs end to end and writes its outputs") {
  const auto dir = scratch("t3");
  const auto r = cli({"scenario", "theorem3", "--config", (kConfigs / "theorem3.json").string(), "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("theorem3: PASS") != std::string::npos);
  CHECK(fs::exists(dir / "verdict.json"));
  CHECK(fs::exists(dir / "theorem3_minimizers.csv"));
  const auto v = nlohmann::json::parse(slurp(dir / "verdict.json"));
  CHECK(v.at("verdict") == "PASS");
  CHECK(v.contains("config_hash"));
  CHECK(v.contains("numeric_policy"));
}

TEST_CASE("verdicts are byte-identical across runs and thread counts") {
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  const std::string cfg = (kConfigs / "dfs_ns.json").string();
  REQUIRE(cli({"scenario", "dfs_ns", "--config", cfg, "--out", a.string()}).code == 0);
  setenv("GCSIEVE_THREADS", "3", 1);
  REQUIRE(cli({"scenario", "dfs_ns", "--config", cfg, "--out", b.string()}).code == 0);
  unsetenv("GCSIEVE_THREADS");
  CHECK(slurp(a / "verdict.json") == slurp(b / "verdict.json"));
}

TEST_CASE("missing config exits 1 and names the path") {
  const auto r = cli({"scenario", "theorem3", "--config", "/nonexistent/t3.json"});
  CHECK(r.code == 1);
  CHECK(r.err.find("/nonexistent/t3.json") != std::string::npos);
}

TEST_CASE("usage errors exit 1") {
  CHECK(cli({"frobnicate"}).code == 1);
  CHECK(cli({"scenario", "nosuch", "--config", "x.json"}).code == 1);
  CHECK(cli({}).code == 1);
}

TEST_CASE("malformed config reports the line") {
  const auto dir = scratch("bad");
  std::ofstream(dir / "bad.json") << "{\n  \"seed\": 1,\n  \"J\": [1,,2]\n}\n";
  const auto r = cli({"scenario", "theorem1", "--config", (dir / "bad.json").string(), "--out", dir.string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("line 3") != std::string::npos);
}

TEST_CASE("zero temperature expected to be proportional gives a FAIL verdict") {
  auto cfg = nlohmann::json::parse(slurp(kConfigs / "qome.json"));
  cfg["cases"] = nlohmann::json::array({{{"nbar", 0.0}, {"gamma2", 1.0}, {"expect_proportional", true}}});
  const auto dir = scratch("qome0");
  std::ofstream(dir / "qome0.json") << cfg.dump(2);
  const auto r = cli({"scenario", "qome", "--config", (dir / "qome0.json").string(), "--out", dir.string()});
  CHECK(r.code == 2);
  CHECK(r.out.find("qome: FAIL") != std::string::npos);
  CHECK(nlohmann::json::parse(slurp(dir / "verdict.json")).at("verdict") == "FAIL");
}

TEST_CASE("thresholds come only from the config") {
  auto cfg = nlohmann::json::parse(slurp(kConfigs / "theorem3.json"));
  cfg["thresholds"].erase("ratio_rel");
  CHECK_THROWS_AS((void)run_scenario("theorem3", cfg), ConfigError);
  auto no_seed = nlohmann::json::parse(slurp(kConfigs / "theorem3.json"));
  no_seed.erase("seed");
  CHECK_THROWS_AS((void)run_scenario("theorem3", no_seed), ConfigError);
}

TEST_CASE("output directory precedence: flag, then environment, then config") {
  const auto root = scratch("outdir");
  auto cfg = nlohmann::json::parse(slurp(kConfigs / "theorem3.json"));
  cfg["output_dir"] = (root / "from_config").string();
  std::ofstream(root / "t3.json") << cfg.dump();
  const std::string path = (root / "t3.json").string();

  REQUIRE(cli({"scenario", "theorem3", "--config", path}).code == 0);
  CHECK(fs::exists(root / "from_config" / "verdict.json"));

  setenv("GCSIEVE_OUT_DIR", (root / "from_env").string().c_str(), 1);
  REQUIRE(cli({"scenario", "theorem3", "--config", path}).code == 0);
  CHECK(fs::exists(root / "from_env" / "theorem3" / "verdict.json"));
  REQUIRE(cli({"scenario", "theorem3", "--config", path, "--out", (root / "from_flag").string()}).code == 0);
  unsetenv("GCSIEVE_OUT_DIR");
  CHECK(fs::exists(root / "from_flag" / "verdict.json"));
}

TEST_CASE("evolve, sieve, uncertainty and dfs subcommands") {
  const auto dir = scratch("sub");
  std::ofstream(dir / "damped.json") << R"({"space": {"kind": "qubit"}, "hamiltonian": "sz/2",
                                          "lindblad": [{"op": "sm", "rate": 0.5}]})";
  std::ofstream(dir / "plus.json") << R"({"amplitudes": [1, 1]})";
  const auto ev = cli({"evolve", "--model", (dir / "damped.json").string(), "--state", (dir / "plus.json").string(),
                       "--tmax", "1", "--steps", "4"});
  CHECK(ev.code == 0);
  CHECK(ev.out.rfind("t,purity,rate_formula\n0,1,", 0) == 0);

  const auto sv = cli({"sieve", "--model", (dir / "damped.json").string(), "--starts", "8", "--out", dir.string()});
  CHECK(sv.code == 0);
  const auto report = nlohmann::json::parse(slurp(dir / "sieve.json"));
  CHECK(report.at("global_min_value").get<double>() <= 1e-12);

  const auto un = cli({"uncertainty", "--rep", "su2-spinJ:J=3/2", "--random", "200", "--seed", "4"});
  CHECK(un.code == 0);
  CHECK(nlohmann::json::parse(un.out).at("bound").get<double>() == doctest::Approx(1.5));

  std::ofstream(dir / "four.json") << R"({"space": {"kind": "collective", "N": 4},
                                        "lindblad": [{"op": "Jx"}, {"op": "Jy"}, {"op": "Jz"}]})";
  const auto d = cli({"dfs", "--model", (dir / "four.json").string()});
  CHECK(d.code == 0);
  CHECK(nlohmann::json::parse(d.out).at("dfs_dim") == 2);
}

TEST_CASE("report helpers are stable") {
  CHECK(round_sig(1.0 / 3.0) == 0.333333333333);
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(csv_table({"a", "b"}, {{1.0, 0.1 + 0.2}}) == "a,b\n1,0.3\n");
}

}  // TEST_SUITE
