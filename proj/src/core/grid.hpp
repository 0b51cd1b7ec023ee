#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"

namespace fpnet {

using cplx = std::complex<double>;

// Square row-major array. Row index is y, column index is x.
template <class T>
class Grid {
 public:
  Grid() = default;
  explicit Grid(std::size_t side, T fill = T{})
      : side_(side), data_(side * side, fill) {}
  Grid(std::size_t side, std::vector<T> data) : side_(side), data_(std::move(data)) {
    require(data_.size() == side_ * side_, ErrorCode::Dimension,
            "grid data length " + std::to_string(data_.size()) +
                " does not match side " + std::to_string(side_));
  }

  std::size_t side() const noexcept { return side_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t row, std::size_t col) { return data_[row * side_ + col]; }
  const T& operator()(std::size_t row, std::size_t col) const {
    return data_[row * side_ + col];
  }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }
  std::vector<T>& raw() noexcept { return data_; }
  const std::vector<T>& raw() const noexcept { return data_; }

  bool operator==(const Grid&) const = default;

 private:
  std::size_t side_ = 0;
  std::vector<T> data_;
};

using RealGrid = Grid<double>;
using ComplexGrid = Grid<cplx>;

// Complex sample field or point-spread function; origin at index (0, 0).
struct ComplexField {
  ComplexGrid data;
  double px = 1.0;  // pixel pitch, um

  std::size_t side() const noexcept { return data.side(); }
};

// Centered Fourier-domain array: zero frequency at (side/2, side/2).
struct Spectrum {
  ComplexGrid data;
  double dk = 1.0;  // bin spacing, cycles/um
  bool centered = true;

  std::size_t side() const noexcept { return data.side(); }
};

// Real measurement or real object/pattern.
struct RealImage {
  RealGrid data;
  double px = 1.0;

  std::size_t side() const noexcept { return data.side(); }
};

// Integer spectral translation in bins; x moves columns, y moves rows.
struct BinShift {
  int x = 0;
  int y = 0;
  bool operator==(const BinShift&) const = default;
};

inline void require_same_side(std::size_t a, std::size_t b, const char* what) {
  require(a == b, ErrorCode::Dimension,
          std::string(what) + ": side mismatch (" + std::to_string(a) + " vs " +
              std::to_string(b) + ")");
}

}  // namespace fpnet
