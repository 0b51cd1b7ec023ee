#include "optics.hpp"

#include <algorithm>
#include <cmath>

namespace fpnet {

void OpticsConfig::validate() const {
  require(n_high >= 2, ErrorCode::Config, "optics: n_high must be >= 2");
  require(stride >= 1, ErrorCode::Config, "optics: stride must be >= 1");
  require(n_high % stride == 0, ErrorCode::Config,
          "optics: n_high (" + std::to_string(n_high) + ") is not divisible by stride (" +
              std::to_string(stride) + ")");
  require(lambda_um > 0.0, ErrorCode::Config, "optics: lambda_um must be > 0");
  require(px_high > 0.0, ErrorCode::Config, "optics: px_high must be > 0");
  require(na > 0.0 && na < 1.0, ErrorCode::Config, "optics: na must lie in (0, 1)");
  for (const auto& k : wavevectors) {
    require(std::abs(k.kx) < 1.0 && std::abs(k.ky) < 1.0, ErrorCode::Config,
            "optics: wave-vector components must satisfy |k| < 1");
  }
  require(ctf_radius_bins() < static_cast<double>(n_high) / 2.0, ErrorCode::Config,
          "optics: aperture does not fit inside the spectrum");
}

BinShift OpticsConfig::shift(std::size_t n) const {
  require(n < wavevectors.size(), ErrorCode::InvalidArgument,
          "illumination index " + std::to_string(n) + " out of range");
  const double bins_per_unit = static_cast<double>(n_high) * px_high / lambda_um;
  return {static_cast<int>(std::lround(wavevectors[n].kx * bins_per_unit)),
          static_cast<int>(std::lround(wavevectors[n].ky * bins_per_unit))};
}

double OpticsConfig::synthetic_na() const noexcept {
  double kmax = 0.0;
  for (const auto& k : wavevectors) kmax = std::max(kmax, std::hypot(k.kx, k.ky));
  return na + kmax;
}

}  // namespace fpnet
