#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace docmap {

// Whole-file helpers; failures raise IoError naming the path.
std::string read_file(const std::filesystem::path& path);
// Creates parent directories as needed.
void write_file(const std::filesystem::path& path, std::string_view content);

// Artifact numbers are printed with a fixed precision so output bytes are
// stable across runs.
std::string format_sig(double value, int significant_digits = 9);
std::string format_fixed(double value, int decimals = 6);

std::vector<std::string> split(std::string_view line, char sep);

// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

}  // namespace docmap
