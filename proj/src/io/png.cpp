#include "png.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <string>

namespace fpnet::io {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// libpng reports errors through longjmp; the message lands here and is
// rethrown once control is back in C++ frames.
struct Context {
  std::string error;
  PngImage image;
  std::vector<unsigned char> buf;
  std::vector<png_bytep> rows;
};

void on_error(png_structp png, png_const_charp message) {
  static_cast<Context*>(png_get_error_ptr(png))->error = message;
  png_longjmp(png, 1);
}
void on_warning(png_structp, png_const_charp) {}

bool read_impl(std::FILE* file, Context& ctx) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &ctx, on_error, on_warning);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_init_io(png, file);
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  png_set_expand(png);  // palette -> rgb, low-depth gray -> 8 bit
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  PngImage& img = ctx.image;
  img.width = png_get_image_width(png, info);
  img.height = png_get_image_height(png, info);
  img.bit_depth = png_get_bit_depth(png, info);
  img.channels = png_get_channels(png, info);
  const std::size_t row_bytes = png_get_rowbytes(png, info);
  ctx.buf.resize(row_bytes * img.height);
  ctx.rows.resize(img.height);
  for (std::size_t r = 0; r < img.height; ++r) ctx.rows[r] = ctx.buf.data() + r * row_bytes;
  png_read_image(png, ctx.rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

bool write_impl(std::FILE* file, const PngImage& image, Context& ctx) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &ctx, on_error, on_warning);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, file);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height),
               image.bit_depth, image.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (auto row : ctx.rows) png_write_row(png, row);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

}  // namespace

PngImage read_png(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) fail(ErrorCode::Io, "cannot open '" + path.string() + "'");
  unsigned char sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
    fail(ErrorCode::Io, "'" + path.string() + "' is not a PNG file");

  Context ctx;
  if (!read_impl(file.get(), ctx))
    fail(ErrorCode::Io, "png '" + path.string() + "': " + (ctx.error.empty() ? "out of memory" : ctx.error));
  PngImage img = std::move(ctx.image);
  if (img.channels != 1 && img.channels != 3)
    fail(ErrorCode::Io, "png '" + path.string() + "': unsupported channel count");

  const std::size_t per_row = img.width * img.channels;
  img.samples.resize(per_row * img.height);
  for (std::size_t r = 0; r < img.height; ++r) {
    const unsigned char* p = ctx.rows[r];
    for (std::size_t i = 0; i < per_row; ++i)
      img.samples[r * per_row + i] =
          img.bit_depth == 16 ? static_cast<std::uint16_t>((p[2 * i] << 8) | p[2 * i + 1]) : p[i];
  }
  return img;
}

void write_png(const std::filesystem::path& path, const PngImage& image) {
  require(image.channels == 1 || image.channels == 3, ErrorCode::Dimension, "png: channels must be 1 or 3");
  require(image.bit_depth == 8 || image.bit_depth == 16, ErrorCode::Dimension, "png: bit depth must be 8 or 16");
  require(image.samples.size() == image.width * image.height * image.channels, ErrorCode::Dimension,
          "png: sample count does not match the image shape");
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) fail(ErrorCode::Io, "cannot write '" + path.string() + "'");

  Context ctx;
  const std::size_t per_row = image.width * image.channels;
  const std::size_t bytes = image.bit_depth == 16 ? 2 : 1;
  ctx.buf.resize(per_row * bytes * image.height);
  for (std::size_t i = 0; i < image.samples.size(); ++i) {
    const std::uint16_t s = image.samples[i];
    if (bytes == 2) {
      ctx.buf[2 * i] = static_cast<unsigned char>(s >> 8);
      ctx.buf[2 * i + 1] = static_cast<unsigned char>(s & 0xff);
    } else {
      ctx.buf[i] = static_cast<unsigned char>(s);
    }
  }
  for (std::size_t r = 0; r < image.height; ++r) ctx.rows.push_back(ctx.buf.data() + r * per_row * bytes);
  if (!write_impl(file.get(), image, ctx))
    fail(ErrorCode::Io, "png '" + path.string() + "': " + (ctx.error.empty() ? "out of memory" : ctx.error));
}

std::vector<std::uint8_t> to_gray8(const RealGrid& values, double lo, double hi) {
  std::vector<std::uint8_t> out(values.size(), 0);
  const double span = hi - lo;
  if (!(span > 0.0)) return out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double t = std::clamp((values[i] - lo) / span, 0.0, 1.0);
    out[i] = static_cast<std::uint8_t>(std::lround(t * 255.0));
  }
  return out;
}

PngImage gray8_image(std::size_t side, const std::vector<std::uint8_t>& pixels) {
  PngImage img;
  img.width = img.height = side;
  img.samples.assign(pixels.begin(), pixels.end());
  return img;
}

void write_amplitude_png(const std::filesystem::path& path, const RealGrid& amplitude) {
  double hi = 0.0;
  for (double v : amplitude.values()) hi = std::max(hi, v);
  write_png(path, gray8_image(amplitude.side(), to_gray8(amplitude, 0.0, hi)));
}

void write_phase_png(const std::filesystem::path& path, const RealGrid& phase) {
  write_png(path, gray8_image(phase.side(), to_gray8(phase, -std::numbers::pi, std::numbers::pi)));
}

void fuse_color(const std::filesystem::path& red, const std::filesystem::path& green,
                const std::filesystem::path& blue, const std::filesystem::path& out) {
  const PngImage planes[3] = {read_png(red), read_png(green), read_png(blue)};
  for (const auto& p : planes) {
    if (p.channels != 1)
      fail(ErrorCode::Io, "fuse-color inputs must be grayscale");
    if (p.width != planes[0].width || p.height != planes[0].height)
      fail(ErrorCode::Dimension, "fuse-color inputs differ in size");
  }
  PngImage rgb;
  rgb.width = planes[0].width;
  rgb.height = planes[0].height;
  rgb.channels = 3;
  rgb.samples.resize(rgb.width * rgb.height * 3);
  for (std::size_t i = 0; i < rgb.width * rgb.height; ++i)
    for (std::size_t c = 0; c < 3; ++c) {
      // 16-bit inputs are reduced to 8 bits so the channels share one scale.
      const auto& p = planes[c];
      rgb.samples[3 * i + c] = p.bit_depth == 16 ? static_cast<std::uint16_t>(p.samples[i] >> 8) : p.samples[i];
    }
  write_png(out, rgb);
}

}  // namespace fpnet::io
