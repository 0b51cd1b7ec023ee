#pragma once

#include <cstddef>
#include <span>

#include "grid.hpp"

namespace fpnet::fft {

enum class Direction { Forward, Inverse };

// Unnormalized in-place 2D DFT of a side x side row-major array.
// Forward uses the e^{-i 2 pi k n / N} kernel.
void transform_inplace(std::span<cplx> data, std::size_t side, Direction dir);

// Unitary transforms with centered spectra (zero frequency at side/2).
ComplexGrid forward_centered(const ComplexGrid& field);
ComplexGrid inverse_centered(const ComplexGrid& spectrum);

// Cyclic roll: out(r, c) = in(r - dy, c - dx) with indices mod side.
template <class T>
Grid<T> roll(const Grid<T>& in, long dy, long dx) {
  const long n = static_cast<long>(in.side());
  Grid<T> out(in.side());
  for (long r = 0; r < n; ++r) {
    const long rr = ((r + dy) % n + n) % n;
    for (long c = 0; c < n; ++c) {
      const long cc = ((c + dx) % n + n) % n;
      out(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc)) =
          in(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    }
  }
  return out;
}

}  // namespace fpnet::fft
