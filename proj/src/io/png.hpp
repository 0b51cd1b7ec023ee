#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "core/grid.hpp"

namespace fpnet::io {

// Decoded PNG with every sample as its integer code (palette and low bit
// depths expanded, alpha dropped).
struct PngImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t channels = 1;  // 1 gray, 3 rgb
  int bit_depth = 8;         // 8 or 16
  std::vector<std::uint16_t> samples;  // row-major, interleaved channels

  std::uint16_t max_code() const { return bit_depth == 16 ? 65535 : 255; }
};

PngImage read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const PngImage& image);

// Linear map of [lo, hi] to 0..255 (clamped).
std::vector<std::uint8_t> to_gray8(const RealGrid& values, double lo, double hi);
PngImage gray8_image(std::size_t side, const std::vector<std::uint8_t>& pixels);

// Amplitude scaled by its maximum; all-zero input renders black.
void write_amplitude_png(const std::filesystem::path& path, const RealGrid& amplitude);
// Phase in radians, [-pi, pi] mapped linearly to [0, 255].
void write_phase_png(const std::filesystem::path& path, const RealGrid& phase);

// Stacks three grayscale PNGs of equal size into one RGB PNG.
void fuse_color(const std::filesystem::path& red, const std::filesystem::path& green,
                const std::filesystem::path& blue, const std::filesystem::path& out);

}  // namespace fpnet::io
