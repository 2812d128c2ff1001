#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace shadowacc {

/// Writes `bytes` to a sibling temp file then renames it over `path`,
/// creating parent directories as needed.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

std::string read_file(const std::filesystem::path& path);

}  // namespace shadowacc
