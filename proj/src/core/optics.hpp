#pragma once

#include <cstddef>
#include <vector>

#include "grid.hpp"

namespace fpnet {

// Illumination direction as sines of the incidence angles (fractions of k0).
struct WaveVector {
  double kx = 0.0;
  double ky = 0.0;
  bool operator==(const WaveVector&) const = default;
};

struct OpticsConfig {
  double lambda_um = 0.532;
  double na = 0.1;
  std::size_t n_high = 256;
  std::size_t stride = 4;
  double px_high = 0.43125;
  std::vector<WaveVector> wavevectors{{0.0, 0.0}};

  void validate() const;

  std::size_t m_side() const noexcept { return n_high / stride; }
  double dk() const noexcept { return 1.0 / (static_cast<double>(n_high) * px_high); }
  // Aperture radius in frequency bins; identical on the high- and low-res grids.
  double ctf_radius_bins() const noexcept { return na / lambda_um / dk(); }
  // Spectral translation for illumination n, rounded to whole bins.
  BinShift shift(std::size_t n) const;
  // Objective NA plus the largest illumination wave-vector magnitude.
  double synthetic_na() const noexcept;
};

}  // namespace fpnet
