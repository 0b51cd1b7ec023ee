#include "raw.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "core/error.hpp"

namespace fpnet::io {
namespace {

std::uint32_t to_le(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big)
    return (v >> 24) | ((v >> 8) & 0xff00u) | ((v << 8) & 0xff0000u) | (v << 24);
  return v;
}

}  // namespace

void write_f32(const std::filesystem::path& path, std::span<const double> values) {
  std::vector<std::uint32_t> words(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const float f = static_cast<float>(values[i]);
    std::uint32_t w;
    std::memcpy(&w, &f, sizeof w);
    words[i] = to_le(w);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(words.data()),
            static_cast<std::streamsize>(words.size() * sizeof(std::uint32_t)));
  if (!out) fail(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

std::vector<double> read_f32(const std::filesystem::path& path, std::size_t count) {
  std::error_code ec;
  const auto bytes = std::filesystem::file_size(path, ec);
  if (ec) fail(ErrorCode::Io, "cannot stat '" + path.string() + "': " + ec.message());
  if (bytes != count * sizeof(float))
    fail(ErrorCode::Io, "'" + path.string() + "' holds " + std::to_string(bytes) +
                            " bytes, manifest declares " + std::to_string(count) + " float32 values");
  std::vector<std::uint32_t> words(count);
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path.string() + "'");
  in.read(reinterpret_cast<char*>(words.data()), static_cast<std::streamsize>(bytes));
  if (!in) fail(ErrorCode::Io, "read failed for '" + path.string() + "'");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint32_t w = to_le(words[i]);
    float f;
    std::memcpy(&f, &w, sizeof f);
    out[i] = f;
  }
  return out;
}

}  // namespace fpnet::io
