#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace stlf::io {

// Writes to a sibling temporary file and renames it over `path`, so readers
// never observe a partially written file. Throws Error(Io).
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content);

std::string read_file(const std::filesystem::path& path);

// 17 significant digits: parses back to exactly `v`.
std::string format_double(double v);

}  // namespace stlf::io
