#include <filesystem>
#include <fstream>
#include <functional>

#include <doctest.h>

#include "gcsieve/model_io.hpp"

using namespace gcsieve;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto dir = std::filesystem::temp_directory_path() / "gcsieve_model_io";
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream(path) << text;
  return path;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("model_io") {

TEST_CASE("operator expressions follow arithmetic precedence") {
  const auto space = make_space({{"kind", "boson"}, {"cutoff", 6}});
  const CMatrix& a = space.symbols.at("a");
  const CMatrix ad = a.adjoint();
  const CMatrix id = identity(7);
  const std::map<std::string, double> params{{"omega", 1.5}, {"g", 0.25}};

  CHECK((parse_operator("omega*(n + 0.5)", space, params) - 1.5 * (ad * a + 0.5 * id)).norm() <= 1e-14);
  CHECK((parse_operator("sqrt(2)*(a + 0.5*i*adag)", space) - std::sqrt(2.0) * (a + 0.5 * kI * ad)).norm() <= 1e-14);
  CHECK((parse_operator("-a^2 + 2", space) - (-(a * a) + 2.0 * id)).norm() <= 1e-14);
  CHECK((parse_operator("a*adag - adag*a", space) - commutator(a, ad)).norm() <= 1e-14);
  CHECK((parse_operator("g/2 * x", space, params) - 0.125 * space.symbols.at("x")).norm() <= 1e-14);
  CHECK((parse_operator("0", space)).norm() == 0.0);
}

TEST_CASE("expression errors name the column") {
  const auto space = make_space({{"kind", "qubit"}});
  CHECK(message_of([&] { (void)parse_operator("sz + foo", space); }).find("column 6") != std::string::npos);
  CHECK_THROWS_AS((void)parse_operator("sz / sx", space), ConfigError);
  CHECK_THROWS_AS((void)parse_operator("(sz + sx", space), ConfigError);
  CHECK_THROWS_AS((void)parse_operator("sz^x", space), ConfigError);
  CHECK_THROWS_AS((void)parse_operator("sz 2", space), ConfigError);
}

TEST_CASE("state spaces expose their symbols") {
  CHECK(make_space({{"kind", "boson"}, {"cutoff", 5}, {"modes", 2}}).symbols.count("adag2") == 1);
  CHECK(make_space({{"kind", "spin"}, {"J", "3/2"}}).rep.dim == 4);
  CHECK(make_space({{"kind", "spin"}, {"J", 1}}).symbols.count("Jp") == 1);
  CHECK(make_space({{"kind", "collective"}, {"N", 3}}).rep.dim == 8);
  CHECK_THROWS_AS((void)make_space({{"kind", "fermion"}}), ConfigError);
  CHECK_THROWS_AS((void)make_space({{"cutoff", 5}}), ConfigError);
}

TEST_CASE("model files absorb rates into the Lindblad operators") {
  const nlohmann::json j = {{"space", {{"kind", "qubit"}}},
                            {"parameters", {{"w", 2.0}}},
                            {"hamiltonian", "w/2*sz"},
                            {"lindblad", {{{"op", "sm"}, {"rate", 4.0}}, {{"op", "sz"}, {"rate", 0.0}}}},
                            {"certify_wcl", true}};
  const auto mf = model_from_json(j);
  REQUIRE(mf.model.lindblads.size() == 1);
  CHECK((mf.model.lindblads[0] - 2.0 * pauli::minus()).norm() <= 1e-14);
  CHECK((mf.model.hamiltonian - pauli::z()).norm() <= 1e-14);
  CHECK(mf.model.wcl.has_value());

  auto bad = j;
  bad["lindblad"][0]["rate"] = -1.0;
  CHECK_THROWS_AS((void)model_from_json(bad), ConfigError);
  bad["lindblad"][0]["rate"] = "nosuch";
  CHECK_THROWS_AS((void)model_from_json(bad), ConfigError);

  auto named = j;
  named["lindblad"][0]["rate"] = "w";
  CHECK((model_from_json(named).model.lindblads[0] - std::sqrt(2.0) * pauli::minus()).norm() <= 1e-14);
}

TEST_CASE("JSON syntax errors report the offending line") {
  const auto path = write_temp("broken.json", "{\n  \"space\": {\"kind\": \"qubit\"},\n  \"hamiltonian\": sz\n}\n");
  const std::string msg = message_of([&] { (void)load_json(path); });
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find(path.string()) != std::string::npos);
}

TEST_CASE("missing files are reported with their path") {
  const std::string msg = message_of([] { (void)load_model("/nonexistent/model.json"); });
  CHECK(msg.find("/nonexistent/model.json") != std::string::npos);
}

TEST_CASE("states load from amplitudes or a basis index") {
  const auto psi = state_from_json({{"amplitudes", {1.0, nlohmann::json::array({0.0, 1.0})}}}, 2);
  CHECK(std::abs(psi[1] - cplx(0.0, 1.0 / std::sqrt(2.0))) <= 1e-15);
  CHECK(std::abs(state_from_json({{"basis", 2}}, 3)[2]) == 1.0);
  CHECK_THROWS_AS((void)state_from_json({{"basis", 3}}, 3), ConfigError);
  CHECK_THROWS_AS((void)state_from_json({{"amplitudes", {1.0}}}, 2), ConfigError);
  const auto path = write_temp("state.json", R"({"basis": 1})");
  CHECK(std::abs(load_state(path, 2)[1]) == 1.0);
}

}  // TEST_SUITE
