#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace mamprop {

std::string read_text_file(const std::filesystem::path& path);

/// Writes through a sibling temp file and renames it into place, so readers never
/// observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

std::string hex64(std::uint64_t value);

}  // namespace mamprop
