#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace fpnet::io {

// Raw arrays are float32, little-endian, row-major, no header.
void write_f32(const std::filesystem::path& path, std::span<const double> values);
std::vector<double> read_f32(const std::filesystem::path& path, std::size_t count);

}  // namespace fpnet::io
