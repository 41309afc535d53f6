#include <cstdlib>
#include <iostream>
#include <numbers>

#include <CLI11.hpp>

#include "gcsieve/report.hpp"
#include "gcsieve/scenarios.hpp"
#include "gcsieve/sieve.hpp"
#include "gcsieve/structure.hpp"
#include "gcsieve/uncertainty.hpp"

namespace gcsieve {

namespace {

int env_threads() {
  if (const char* t = std::getenv("GCSIEVE_THREADS")) {
    const int n = std::atoi(t);
    if (n < 1) throw ConfigError("GCSIEVE_THREADS must be a positive integer");
    return n;
  }
  return 1;
}

// --out wins, then GCSIEVE_OUT_DIR, then the config's output_dir, then out/<id>.
std::filesystem::path output_dir(const std::string& flag, const nlohmann::json& config, const std::string& id) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("GCSIEVE_OUT_DIR")) return std::filesystem::path(env) / id;
  if (config.contains("output_dir")) return config.at("output_dir").get<std::string>();
  return std::filesystem::path("out") / id;
}

std::optional<GcsManifold> manifold_for(const LieRepresentation& rep) {
  if (rep.kind == AlgebraKind::Su2Collective || rep.kind == AlgebraKind::Squeeze) return std::nullopt;
  return make_manifold(rep);
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) std::cout << text;
  else write_file_atomic(path, text);
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Pointer-state and coherent-state analysis of Lindblad dynamics"};
  app.require_subcommand(1);

  std::string id, config_path, out_dir;
  auto* scen = app.add_subcommand("scenario", "Run a configured scenario and write its verdict");
  scen->add_option("id", id, "Scenario id")->required()->check(CLI::IsMember(scenario_ids()));
  scen->add_option("--config", config_path, "Scenario config (JSON)")->required();
  scen->add_option("--out", out_dir, "Output directory");

  std::string model_path, objective = "rate", out_file;
  double tau = 0.0;
  int starts = 32;
  std::uint64_t seed = 1;
  auto* sieve = app.add_subcommand("sieve", "Minimize the purity loss over pure states");
  sieve->add_option("--model", model_path, "Model file (JSON)")->required();
  sieve->add_option("--objective", objective, "rate | average")->check(CLI::IsMember({"rate", "average"}));
  sieve->add_option("--tau", tau, "Averaging window (default 2 pi)");
  sieve->add_option("--starts", starts, "Random starts")->check(CLI::Range(8, 100000));
  sieve->add_option("--seed", seed, "Seed");
  sieve->add_option("--out", out_dir, "Directory for sieve.json and sieve.csv (default: JSON to stdout)");

  std::string state_path;
  double tmax = 1.0;
  int steps = 100;
  auto* evo = app.add_subcommand("evolve", "Purity along an exact trajectory, as CSV");
  evo->add_option("--model", model_path, "Model file (JSON)")->required();
  evo->add_option("--state", state_path, "Initial state file (JSON)")->required();
  evo->add_option("--tmax", tmax, "Final time")->check(CLI::NonNegativeNumber);
  evo->add_option("--steps", steps, "Number of steps")->check(CLI::PositiveNumber);
  evo->add_option("--out", out_file, "CSV file (default: stdout)");

  std::string rep_spec;
  int n_random = 10000;
  auto* unc = app.add_subcommand("uncertainty", "Check the invariant uncertainty bound on random states");
  unc->add_option("--rep", rep_spec, "Representation, e.g. su2-spinJ:J=3/2")->required();
  unc->add_option("--random", n_random, "Number of random states")->check(CLI::PositiveNumber);
  unc->add_option("--seed", seed, "Seed");

  auto* dfs = app.add_subcommand("dfs", "Decoherence-free subspace of a model");
  dfs->add_option("--model", model_path, "Model file (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*scen) {
      const auto config = load_json(config_path);
      const auto result = run_scenario(id, config, env_threads());
      const auto dir = output_dir(out_dir, config, id);
      write_outputs(result, dir);
      for (const auto& c : result.verdict.checks)
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << round_sig(c.value) << ' ' << c.relation
                  << ' ' << c.threshold << '\n';
      std::cout << id << ": " << (result.verdict.passed() ? "PASS" : "FAIL") << " (" << dir.string() << ")\n";
      return result.verdict.passed() ? 0 : 2;
    }
    if (*sieve) {
      const auto mf = load_model(model_path);
      SieveOptions o;
      o.n_starts = starts;
      o.seed = seed;
      o.threads = env_threads();
      o.manifold = manifold_for(mf.space.rep);
      if (mf.space.rep.is_bosonic()) {
        o.domain = guarded_domain(mf.space.rep);
        o.start_support = boson_start_support(mf.space.rep);
      }
      const auto obj = objective == "rate"
                           ? SieveObjective::rate(mf.model)
                           : SieveObjective::first_order_average(mf.model, tau > 0.0 ? tau : 2.0 * std::numbers::pi);
      const auto report = sieve_search(obj, o, std::filesystem::path(model_path).stem().string());
      if (out_dir.empty()) {
        std::cout << to_json(report).dump(2) << '\n';
      } else {
        write_file_atomic(std::filesystem::path(out_dir) / "sieve.json", to_json(report).dump(2) + "\n");
        write_file_atomic(std::filesystem::path(out_dir) / "sieve.csv", to_csv(report));
      }
      return 0;
    }
    if (*evo) {
      const auto mf = load_model(model_path);
      const auto psi = load_state(state_path, mf.model.dim());
      std::vector<double> times;
      for (int k = 0; k <= steps; ++k) times.push_back(tmax * k / steps);
      const auto tr = purity_trace(mf.model, psi, times);
      std::vector<std::vector<double>> rows;
      for (std::size_t k = 0; k < times.size(); ++k) rows.push_back({tr.times[k], tr.purity[k], tr.rate_formula[k]});
      emit(csv_table({"t", "purity", "rate_formula"}, rows), out_file);
      return 0;
    }
    if (*unc) {
      const auto rep = make_representation(rep_spec);
      const auto r = verify_theorem1(rep, n_random, seed);
      std::cout << to_json(r).dump(2) << '\n';
      return r.passed ? 0 : 2;
    }
    if (*dfs) {
      const auto mf = load_model(model_path);
      const CMatrix basis = dfs_extract(mf.model);
      nlohmann::json j;
      j["dfs_dim"] = basis.cols();
      j["basis"] = nlohmann::json::array();
      for (Eigen::Index c = 0; c < basis.cols(); ++c) j["basis"].push_back(amplitudes_json(basis.col(c)));
      if (mf.space.rep.kind == AlgebraKind::Su2Collective) j["decomposition"] = to_json(decompose(mf.space.rep));
      std::cout << j.dump(2) << '\n';
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace gcsieve
