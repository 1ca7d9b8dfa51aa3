#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

namespace partisan::pipeline::detail {

std::string read_bytes(const std::filesystem::path& path);
void write_bytes(const std::filesystem::path& path, const std::string& bytes);

nlohmann::json read_json(const std::filesystem::path& path);
// dump(2) with a trailing newline; keys serialize sorted, so output is stable.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

// FNV-1a 64-bit over raw bytes, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace partisan::pipeline::detail
