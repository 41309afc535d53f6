// Thin numpy-facing layer over the C++ library. Structured results cross the
// boundary as JSON text and are decoded in the Python package.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gcsieve/gcs.hpp"
#include "gcsieve/model_io.hpp"
#include "gcsieve/scenarios.hpp"
#include "gcsieve/sieve.hpp"
#include "gcsieve/structure.hpp"
#include "gcsieve/uncertainty.hpp"

namespace py = pybind11;
using namespace gcsieve;

namespace {

LindbladModel model_of(const CMatrix& h, const std::vector<CMatrix>& ls) { return make_model(h, ls); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Pointer-state search and generalized coherent states for Lindblad models";

  // Registered base first so ConfigError is caught by `except gcsieve.Error`.
  auto& base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  m.def(
      "purity_rate",
      [](const CMatrix& h, const std::vector<CMatrix>& ls, const CVector& psi) {
        return purity_rate(PureState::normalized(psi), model_of(h, ls));
      },
      py::arg("hamiltonian"), py::arg("lindblads"), py::arg("state"),
      "Instantaneous purity-loss rate 2 sum_l (Delta L_l)^2 of a pure state.");

  m.def(
      "evolve",
      [](const CMatrix& h, const std::vector<CMatrix>& ls, const CMatrix& rho0, const std::vector<double>& times) {
        std::vector<CMatrix> out;
        for (const auto& rho : evolve(model_of(h, ls), DensityMatrix(rho0), times)) out.push_back(rho.matrix());
        return out;
      },
      py::arg("hamiltonian"), py::arg("lindblads"), py::arg("rho0"), py::arg("times"));

  m.def(
      "invariant_uncertainty",
      [](const std::string& rep, const CVector& psi) {
        return invariant_uncertainty(PureState::normalized(psi), make_representation(rep));
      },
      py::arg("rep"), py::arg("state"));

  m.def(
      "gcs_infidelity",
      [](const std::string& rep, const CVector& psi) {
        return gcs_distance(PureState::normalized(psi), make_manifold(make_representation(rep))).infidelity;
      },
      py::arg("rep"), py::arg("state"), "Infidelity to the nearest coherent state of the representation.");

  m.def(
      "sieve_json",
      [](const CMatrix& h, const std::vector<CMatrix>& ls, int n_starts, std::uint64_t seed, const std::string& rep) {
        SieveOptions o;
        o.n_starts = n_starts;
        o.seed = seed;
        if (!rep.empty()) {
          const auto r = make_representation(rep);
          o.manifold = make_manifold(r);
          if (r.cutoff) {
            o.domain = guarded_domain(r);
            o.start_support = boson_start_support(r);
          }
        }
        py::gil_scoped_release release;
        return to_json(sieve_search(model_of(h, ls), o)).dump();
      },
      py::arg("hamiltonian"), py::arg("lindblads"), py::arg("n_starts") = 16, py::arg("seed") = 1,
      py::arg("rep") = "");

  m.def(
      "decompose_collective_json", [](int n) { return to_json(decompose(collective_spin_rep(n))).dump(); },
      py::arg("n_spins"));

  m.def(
      "run_scenario_json",
      [](const std::string& id, const std::string& config, int threads) {
        const auto cfg = nlohmann::json::parse(config);
        py::gil_scoped_release release;
        return to_json(run_scenario(id, cfg, threads).verdict).dump();
      },
      py::arg("scenario"), py::arg("config"), py::arg("threads") = 1);
}
