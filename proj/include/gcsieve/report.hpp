#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gcsieve/opsalg.hpp"

namespace gcsieve {

/// Rounds to `digits` significant digits so serialized output is stable.
[[nodiscard]] double round_sig(double x, int digits = 12);
[[nodiscard]] nlohmann::json num(double x);
[[nodiscard]] nlohmann::json amplitudes_json(const CVector& v);

/// 64-bit FNV-1a digest, hex encoded.
[[nodiscard]] std::string fnv1a_hex(const std::string& bytes);

/// Writes via a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Rows of numbers, 12 significant digits, with a header line.
[[nodiscard]] std::string csv_table(const std::vector<std::string>& header,
                                    const std::vector<std::vector<double>>& rows);

}  // namespace gcsieve
