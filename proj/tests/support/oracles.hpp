#pragma once

// Reference computations for tests. Everything here is a direct sum or a
// dense solve and shares no code with the library transforms.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "core/optics.hpp"
#include "core/simdata.hpp"

namespace oracle {

using cplx = std::complex<double>;
using fpnet::ComplexGrid;
using fpnet::RealGrid;

// exp(2 pi i m / n) for m in [0, n).
inline std::vector<cplx> roots(std::size_t n) {
  std::vector<cplx> w(n);
  for (std::size_t m = 0; m < n; ++m)
    w[m] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n));
  return w;
}

inline std::size_t wrap(long v, std::size_t n) {
  const long m = v % static_cast<long>(n);
  return static_cast<std::size_t>(m < 0 ? m + static_cast<long>(n) : m);
}

// Unitary DFT, zero frequency at (n/2, n/2), spatial origin at (0, 0).
// Separable direct sums.
inline ComplexGrid dft_centered(const ComplexGrid& x) {
  const std::size_t n = x.side();
  const auto w = roots(n);
  const long c = static_cast<long>(n / 2);
  ComplexGrid rows(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t kc = 0; kc < n; ++kc) {
      const long k = static_cast<long>(kc) - c;
      cplx acc = 0.0;
      for (std::size_t col = 0; col < n; ++col) acc += x(r, col) * std::conj(w[wrap(k * static_cast<long>(col), n)]);
      rows(r, kc) = acc;
    }
  ComplexGrid out(n);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t kc = 0; kc < n; ++kc)
    for (std::size_t kr = 0; kr < n; ++kr) {
      const long k = static_cast<long>(kr) - c;
      cplx acc = 0.0;
      for (std::size_t r = 0; r < n; ++r) acc += rows(r, kc) * std::conj(w[wrap(k * static_cast<long>(r), n)]);
      out(kr, kc) = acc * scale;
    }
  return out;
}

// Single unitary DFT bin (ky, kx) of a real image.
inline cplx dft_bin(const RealGrid& x, long ky, long kx) {
  const std::size_t n = x.side();
  const auto w = roots(n);
  cplx acc = 0.0;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      acc += x(r, c) * std::conj(w[wrap(ky * static_cast<long>(r) + kx * static_cast<long>(c), n)]);
  return acc / static_cast<double>(n);
}

// Low-resolution intensity of illumination n, summed directly over the
// aperture bins |k - shift| < NA n_high px / lambda.
//   stride: psi(j) = sum_k O~(k) exp(2 pi i k . (s j) / N)
//   crop:   psi(j) = (1/M) sum_q O~(shift + q) exp(2 pi i q . j / M)
inline RealGrid fp_intensity(const fpnet::OpticsConfig& cfg, const ComplexGrid& spectrum, std::size_t n,
                             fpnet::FormationMode mode) {
  const std::size_t big = cfg.n_high, m = cfg.n_high / cfg.stride;
  const long c = static_cast<long>(big / 2);
  const double bins_per_unit = static_cast<double>(big) * cfg.px_high / cfg.lambda_um;
  const double radius = cfg.na * bins_per_unit;
  const long sx = std::lround(cfg.wavevectors[n].kx * bins_per_unit);
  const long sy = std::lround(cfg.wavevectors[n].ky * bins_per_unit);
  struct Bin {
    long qy, qx;
    cplx value;
  };
  std::vector<Bin> bins;
  const long reach = static_cast<long>(std::ceil(radius));
  for (long qy = -reach; qy <= reach; ++qy)
    for (long qx = -reach; qx <= reach; ++qx) {
      if (static_cast<double>(qx * qx + qy * qy) >= radius * radius) continue;
      bins.push_back({qy, qx, spectrum(static_cast<std::size_t>(c + sy + qy), static_cast<std::size_t>(c + sx + qx))});
    }
  const bool crop = mode == fpnet::FormationMode::Crop;
  const std::size_t period = crop ? m : big;
  const auto w = roots(period);
  RealGrid out(m);
  for (std::size_t jy = 0; jy < m; ++jy)
    for (std::size_t jx = 0; jx < m; ++jx) {
      const long y = crop ? static_cast<long>(jy) : static_cast<long>(jy * cfg.stride);
      const long x = crop ? static_cast<long>(jx) : static_cast<long>(jx * cfg.stride);
      cplx acc = 0.0;
      for (const auto& b : bins) {
        const long ky = crop ? b.qy : sy + b.qy;
        const long kx = crop ? b.qx : sx + b.qx;
        acc += b.value * w[wrap(ky * y + kx * x, period)];
      }
      if (crop) acc /= static_cast<double>(m);
      out(jy, jx) = std::norm(acc);
    }
  return out;
}

// Least-squares object from single-pixel data: (P^T P) o = P^T y.
inline std::vector<double> spi_normal_equations(const std::vector<RealGrid>& patterns, const std::vector<double>& y) {
  const auto rows = static_cast<Eigen::Index>(patterns.size());
  const auto cols = static_cast<Eigen::Index>(patterns.front().size());
  Eigen::MatrixXd a(rows, cols);
  Eigen::VectorXd b(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = patterns[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    b(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::MatrixXd ata = a.transpose() * a;
  const Eigen::VectorXd x = ata.ldlt().solve(a.transpose() * b);
  return {x.data(), x.data() + x.size()};
}

}  // namespace oracle
