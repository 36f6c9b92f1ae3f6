#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace termclass::io {

/// Throws std::runtime_error when the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temp file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace termclass::io
