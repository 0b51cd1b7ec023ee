#pragma once

#include <cstddef>

#include "grid.hpp"
#include "optics.hpp"

namespace fpnet {

// Unitary, centered 2D DFT pair. idft2(dft2(x)) == x to rounding.
Spectrum dft2(const ComplexField& field);
ComplexField idft2(const Spectrum& spectrum);

// Binary disk on a centered side x side grid: bin (c+v, c+u) is 1 iff
// sqrt(u^2 + v^2) * dk < cutoff (strict).
Spectrum disk_spectrum(std::size_t side, double dk, double cutoff);

// Objective coherent transfer function at the high-resolution grid.
Spectrum make_ctf(const OpticsConfig& cfg);
// make_ctf translated by cfg.shift(n). Throws OutOfBand if any passing bin
// would leave the array, unless `allow_wrap` requests cyclic wrapping.
Spectrum make_ctf_n(const OpticsConfig& cfg, std::size_t n, bool allow_wrap = false);
ComplexField make_psf_n(const OpticsConfig& cfg, std::size_t n, bool allow_wrap = false);

// Incoherent PSF |PSF_0|^2 normalized to unit sum.
RealImage make_incoherent_psf(const OpticsConfig& cfg);

// Cyclic convolution sum_{x'} a(x') b(x - x') computed through spectra.
ComplexField circular_convolve(const ComplexField& a, const ComplexField& b);
ComplexGrid circular_convolve(const ComplexGrid& a, const ComplexGrid& b);
RealGrid circular_convolve(const RealGrid& a, const RealGrid& b);

// Index reversal x -> -x mod side (turns convolution into correlation).
RealGrid flip(const RealGrid& g);

template <class T>
Grid<T> decimate(const Grid<T>& in, std::size_t stride) {
  require(stride >= 1 && in.side() % stride == 0, ErrorCode::Dimension,
          "decimate: side " + std::to_string(in.side()) + " not divisible by stride " +
              std::to_string(stride));
  const std::size_t m = in.side() / stride;
  Grid<T> out(m);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < m; ++c) out(r, c) = in(r * stride, c * stride);
  return out;
}

template <class T>
Grid<T> zero_upsample(const Grid<T>& in, std::size_t stride) {
  require(stride >= 1, ErrorCode::Dimension, "zero_upsample: stride must be >= 1");
  Grid<T> out(in.side() * stride, T{});
  for (std::size_t r = 0; r < in.side(); ++r)
    for (std::size_t c = 0; c < in.side(); ++c) out(r * stride, c * stride) = in(r, c);
  return out;
}

// m_side x m_side window whose center bin is (side/2 + shift.y, side/2 + shift.x).
Spectrum crop_subspectrum(const Spectrum& spec, BinShift shift, std::size_t m_side);
// Adjoint of crop_subspectrum: scatter the block into a zero side x side array.
Spectrum embed_subspectrum(const Spectrum& block, BinShift shift, std::size_t side);

// Inner product sum conj(a) * b.
cplx inner(const ComplexGrid& a, const ComplexGrid& b);
double inner(const RealGrid& a, const RealGrid& b);
double squared_norm(const ComplexGrid& a);

}  // namespace fpnet
