#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "gcsieve/lindblad.hpp"

namespace gcsieve {

/// Config or model file that failed to load; the message carries the path and,
/// for JSON syntax errors, the offending line.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Reads and parses a JSON file.
[[nodiscard]] nlohmann::json load_json(const std::filesystem::path& path);

/// Operator symbols available in expressions for a state space:
///   boson:      a, adag, n, x, p, I  (a1, adag1, ... for several modes)
///   spin:       Jx, Jy, Jz, Jp, Jm, I
///   collective: as spin, collective operators on N spins
///   qubit:      sx, sy, sz, sp, sm, I   (basis |e>, |g>)
struct OperatorSpace {
  LieRepresentation rep;
  std::map<std::string, CMatrix> symbols;
};

/// {"kind": "boson", "cutoff": 30, "modes": 1} | {"kind": "spin", "J": 1} |
/// {"kind": "collective", "N": 4} | {"kind": "qubit"}
[[nodiscard]] OperatorSpace make_space(const nlohmann::json& spec);

/// Evaluates an operator expression such as "omega*(n + 0.5)" or
/// "sqrt(2)*(a + 0.5*i*adag)". Scalars come from `params`; `i` is the imaginary unit.
[[nodiscard]] CMatrix parse_operator(const std::string& expr, const OperatorSpace& space,
                                     const std::map<std::string, double>& params = {});

struct ModelFile {
  OperatorSpace space;
  LindbladModel model;
};

/// {"space": {...}, "parameters": {...}, "hamiltonian": "...",
///  "lindblad": [{"op": "...", "rate": g}, ...], "certify_wcl": false}
/// Each Lindblad operator is sqrt(rate) * op.
[[nodiscard]] ModelFile model_from_json(const nlohmann::json& j);
[[nodiscard]] ModelFile load_model(const std::filesystem::path& path);

/// {"amplitudes": [[re, im], ...]} or {"basis": k}; amplitudes are normalized.
[[nodiscard]] PureState state_from_json(const nlohmann::json& j, Eigen::Index dim);
[[nodiscard]] PureState load_state(const std::filesystem::path& path, Eigen::Index dim);

}  // namespace gcsieve
