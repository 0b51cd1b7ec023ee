#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "png.hpp"

namespace fpnet::io {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = true;  // non-positive and non-finite points are skipped
  std::vector<Series> series;
};

PngImage render_plot(const Plot& plot, std::size_t width = 760, std::size_t height = 480);
void write_plot_png(const std::filesystem::path& path, const Plot& plot);

}  // namespace fpnet::io
