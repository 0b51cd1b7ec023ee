#pragma once

#include "config.hpp"

namespace fpnet::io {

// Incoherent cutoff of the optics in cycles per pixel.
double incoherent_cutoff(const OpticsConfig& optics);

// Builds the synthetic dataset described by `cfg` (double precision; the
// caller decides whether to quantize).
Dataset build_dataset(const SimulateConfig& cfg);

}  // namespace fpnet::io
