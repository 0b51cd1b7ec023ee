#include "plot.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>

namespace fpnet::io {
namespace {

// 5x7 glyphs, one byte per row, bit 4 is the leftmost column. Lower case
// letters draw as upper case.
struct Glyph {
  char ch;
  std::array<std::uint8_t, 7> rows;
};

constexpr Glyph kFont[] = {
    {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}}, {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}}, {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
    {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}}, {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
    {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}}, {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
    {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}}, {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
    {'A', {0x0E, 0x11, 0x11, 0x11, 0x1F, 0x11, 0x11}}, {'B', {0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E}},
    {'C', {0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E}}, {'D', {0x1C, 0x12, 0x11, 0x11, 0x11, 0x12, 0x1C}},
    {'E', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F}}, {'F', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10}},
    {'G', {0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F}}, {'H', {0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
    {'I', {0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E}}, {'J', {0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C}},
    {'K', {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11}}, {'L', {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F}},
    {'M', {0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11}}, {'N', {0x11, 0x11, 0x19, 0x15, 0x13, 0x11, 0x11}},
    {'O', {0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}}, {'P', {0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10}},
    {'Q', {0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D}}, {'R', {0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11}},
    {'S', {0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E}}, {'T', {0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04}},
    {'U', {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}}, {'V', {0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04}},
    {'W', {0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A}}, {'X', {0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11}},
    {'Y', {0x11, 0x11, 0x11, 0x0A, 0x04, 0x04, 0x04}}, {'Z', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F}},
    {'-', {0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00}}, {'.', {0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C}},
    {'=', {0x00, 0x00, 0x1F, 0x00, 0x1F, 0x00, 0x00}}, {'+', {0x00, 0x04, 0x04, 0x1F, 0x04, 0x04, 0x00}},
    {'(', {0x02, 0x04, 0x08, 0x08, 0x08, 0x04, 0x02}}, {')', {0x08, 0x04, 0x02, 0x02, 0x02, 0x04, 0x08}},
    {',', {0x00, 0x00, 0x00, 0x00, 0x0C, 0x04, 0x08}}, {'/', {0x00, 0x01, 0x02, 0x04, 0x08, 0x10, 0x00}},
    {':', {0x00, 0x0C, 0x0C, 0x00, 0x0C, 0x0C, 0x00}}, {'_', {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x1F}},
};

const Glyph* glyph(char ch) {
  const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  for (const auto& g : kFont)
    if (g.ch == up) return &g;
  return nullptr;
}

struct Rgb {
  std::uint8_t r, g, b;
};

constexpr Rgb kBlack{0, 0, 0};
constexpr Rgb kGrid{215, 215, 215};
constexpr Rgb kMinor{240, 240, 240};
constexpr Rgb kPalette[] = {{31, 119, 180}, {214, 39, 40},  {44, 160, 44},  {255, 127, 14},
                            {148, 103, 189}, {140, 86, 75}, {227, 119, 194}, {23, 190, 207}};

class Canvas {
 public:
  Canvas(std::size_t w, std::size_t h) : w_(w), h_(h), px_(w * h * 3, 255) {}

  void set(long x, long y, Rgb c) {
    if (x < 0 || y < 0 || x >= static_cast<long>(w_) || y >= static_cast<long>(h_)) return;
    const std::size_t i = (static_cast<std::size_t>(y) * w_ + static_cast<std::size_t>(x)) * 3;
    px_[i] = c.r;
    px_[i + 1] = c.g;
    px_[i + 2] = c.b;
  }

  void line(long x0, long y0, long x1, long y1, Rgb c, int thick = 1) {
    const long dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    const long sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    long err = dx + dy;
    for (;;) {
      for (int t = 0; t < thick; ++t) {
        set(x0, y0 + t, c);
        set(x0 + t, y0, c);
      }
      if (x0 == x1 && y0 == y1) break;
      const long e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x0 += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y0 += sy;
      }
    }
  }

  void rect(long x0, long y0, long x1, long y1, Rgb c) {
    for (long y = y0; y <= y1; ++y)
      for (long x = x0; x <= x1; ++x) set(x, y, c);
  }

  // Text with its top-left corner at (x, y); `vertical` runs bottom to top.
  void text(long x, long y, const std::string& s, int scale = 1, bool vertical = false) {
    long pen = 0;
    for (char ch : s) {
      if (const Glyph* g = glyph(ch)) {
        for (int r = 0; r < 7; ++r)
          for (int col = 0; col < 5; ++col) {
            if (!(g->rows[r] & (0x10 >> col))) continue;
            for (int a = 0; a < scale; ++a)
              for (int b = 0; b < scale; ++b) {
                const long u = pen + col * scale + a;
                const long v = r * scale + b;
                if (vertical)
                  set(x + v, y - u, kBlack);
                else
                  set(x + u, y + v, kBlack);
              }
          }
      }
      pen += 6 * scale;
    }
  }

  static long text_width(const std::string& s, int scale = 1) {
    return static_cast<long>(s.size()) * 6 * scale - scale;
  }

  PngImage image() const {
    PngImage img;
    img.width = w_;
    img.height = h_;
    img.channels = 3;
    img.samples.assign(px_.begin(), px_.end());
    return img;
  }

 private:
  std::size_t w_, h_;
  std::vector<std::uint8_t> px_;
};

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::vector<double> linear_ticks(double lo, double hi) {
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) out.push_back(t);
  return out;
}

}  // namespace

PngImage render_plot(const Plot& plot, std::size_t width, std::size_t height) {
  Canvas cv(width, height);
  const long left = 78, right = static_cast<long>(width) - 200, top = 34,
             bottom = static_cast<long>(height) - 48;

  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!plot.log_y || y > 0.0);
  };
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : plot.series)
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      const double y = plot.log_y ? std::log10(s.y[i]) : s.y[i];
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (!std::isfinite(xmin)) {
    xmin = 0.0;
    xmax = 1.0;
    ymin = 0.0;
    ymax = 1.0;
  }
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (plot.log_y) {
    ymin = std::floor(ymin);
    ymax = std::max(std::ceil(ymax), ymin + 1.0);
  } else if (ymax <= ymin) {
    ymax = ymin + 1.0;
  }

  auto px = [&](double x) {
    return left + std::lround((x - xmin) / (xmax - xmin) * static_cast<double>(right - left));
  };
  auto py = [&](double y) {
    return bottom - std::lround((y - ymin) / (ymax - ymin) * static_cast<double>(bottom - top));
  };

  // Grid and tick labels.
  std::vector<std::pair<double, std::string>> yticks;
  if (plot.log_y) {
    const double stride = std::max(1.0, std::ceil((ymax - ymin) / 8.0));
    for (double e = ymin; e <= ymax + 1e-9; e += stride) yticks.emplace_back(e, "1E" + tick_label(e));
  } else {
    for (double t : linear_ticks(ymin, ymax)) yticks.emplace_back(t, tick_label(t));
  }
  if (plot.log_y && ymax - ymin <= 4.0)
    for (double e = ymin; e < ymax; ++e)
      for (int k = 2; k <= 9; ++k) {
        const long y = py(e + std::log10(static_cast<double>(k)));
        cv.line(left, y, right, y, kMinor);
        cv.line(left - 2, y, left, y, kBlack);
      }
  for (const auto& [v, label] : yticks) {
    const long y = py(v);
    cv.line(left, y, right, y, kGrid);
    cv.line(left - 4, y, left, y, kBlack);
    cv.text(left - 7 - Canvas::text_width(label), y - 3, label);
  }
  for (double t : linear_ticks(xmin, xmax)) {
    const long x = px(t);
    cv.line(x, top, x, bottom, kGrid);
    cv.line(x, bottom, x, bottom + 4, kBlack);
    const std::string label = tick_label(t);
    cv.text(x - Canvas::text_width(label) / 2, bottom + 8, label);
  }
  cv.line(left, top, left, bottom, kBlack);
  cv.line(left, bottom, right, bottom, kBlack);
  cv.line(left, top, right, top, kBlack);
  cv.line(right, top, right, bottom, kBlack);

  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    const Rgb color = kPalette[k % std::size(kPalette)];
    bool have_prev = false;
    long x0 = 0, y0 = 0;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i])) {
        have_prev = false;
        continue;
      }
      const long x1 = px(s.x[i]);
      const long y1 = py(plot.log_y ? std::log10(s.y[i]) : s.y[i]);
      if (have_prev)
        cv.line(x0, y0, x1, y1, color, 2);
      else
        cv.rect(x1 - 1, y1 - 1, x1 + 1, y1 + 1, color);
      x0 = x1;
      y0 = y1;
      have_prev = true;
    }
    const long ly = top + 6 + static_cast<long>(k) * 14;
    cv.rect(right + 12, ly + 2, right + 28, ly + 4, color);
    cv.text(right + 34, ly, s.label);
  }

  cv.text((left + right) / 2 - Canvas::text_width(plot.title, 2) / 2, 8, plot.title, 2);
  cv.text((left + right) / 2 - Canvas::text_width(plot.x_label) / 2, bottom + 24, plot.x_label);
  const std::string ylab = plot.log_y ? plot.y_label + " (log)" : plot.y_label;
  cv.text(10, (top + bottom) / 2 + Canvas::text_width(ylab) / 2, ylab, 1, true);
  return cv.image();
}

void write_plot_png(const std::filesystem::path& path, const Plot& plot) {
  write_png(path, render_plot(plot));
}

}  // namespace fpnet::io
