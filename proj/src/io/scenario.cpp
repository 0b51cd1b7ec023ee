#include "scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "core/field.hpp"
#include "png.hpp"

namespace fpnet::io {
namespace {

RealGrid amplitude_map(std::size_t side, const ObjectSpec& spec) {
  RealGrid a = test_pattern(side, spec.seed);
  for (auto& v : a.values()) v = spec.amplitude_min + (1.0 - spec.amplitude_min) * v;
  return a;
}

RealGrid real_object(std::size_t side, const ObjectSpec& spec) {
  RealGrid a = amplitude_map(side, spec);
  if (!spec.band_limit_bins) return a;
  ComplexGrid z(side);
  for (std::size_t i = 0; i < a.size(); ++i) z[i] = a[i];
  z = band_limit(z, *spec.band_limit_bins);
  // Band limiting can dip slightly below zero; intensities must stay >= 0.
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::max(0.0, z[i].real());
  return a;
}

// Codes become float32 intensities unchanged; the code range goes to the
// provenance so the scale of the stack is known.
Dataset import_fp(const SimulateConfig& cfg) {
  Dataset ds;
  ds.kind = DatasetKind::Fp;
  ds.mode = cfg.mode;
  ds.cfg = cfg.optics;
  const std::size_t m = cfg.optics.n_high / cfg.optics.stride;
  int depth = 0;
  std::uint16_t lo = 65535, hi = 0;
  nlohmann::json files = nlohmann::json::array();
  for (const auto& path : cfg.measurement_pngs) {
    const PngImage img = read_png(path);
    if (img.channels != 1) fail(ErrorCode::Io, "'" + path.string() + "': measurements must be grayscale");
    if (img.width != m || img.height != m)
      fail(ErrorCode::Dimension, "'" + path.string() + "' is " + std::to_string(img.width) + "x" +
                                     std::to_string(img.height) + ", expected " + std::to_string(m) +
                                     "x" + std::to_string(m));
    if (depth && img.bit_depth != depth) fail(ErrorCode::Io, "measurement PNGs mix bit depths");
    depth = img.bit_depth;
    RealImage meas{RealGrid(m), cfg.optics.px_high * static_cast<double>(cfg.optics.stride)};
    for (std::size_t i = 0; i < img.samples.size(); ++i) {
      meas.data[i] = img.samples[i];
      lo = std::min(lo, img.samples[i]);
      hi = std::max(hi, img.samples[i]);
    }
    ds.measurements.push_back(std::move(meas));
    files.push_back(path.filename().string());
  }
  ds.provenance = {{"generator", "png import"},
                   {"png_files", files},
                   {"png_range", {{"bit_depth", depth},
                                  {"full_scale", depth == 16 ? 65535 : 255},
                                  {"min_code", lo},
                                  {"max_code", hi}}}};
  return ds;
}

Dataset build_fp(const SimulateConfig& cfg) {
  if (!cfg.measurement_pngs.empty()) return import_fp(cfg);
  const std::size_t side = cfg.optics.n_high;
  const RealGrid amp = amplitude_map(side, cfg.object);
  const RealGrid phase = test_pattern(side, cfg.object.seed + 1);
  FpObject obj = synth_object({amp, cfg.optics.px_high}, {phase, cfg.optics.px_high}, cfg.object.phase);
  if (cfg.object.band_limit_bins)
    obj = FpObject::from_complex(band_limit(obj.complex(), *cfg.object.band_limit_bins));
  return generate_dataset(cfg.optics, obj, cfg.mode, cfg.noise);
}

Dataset build_sim(const SimulateConfig& cfg) {
  OpticsConfig optics = cfg.optics;
  optics.stride = 1;
  optics.wavevectors = {{0.0, 0.0}};
  const std::size_t side = optics.n_high;
  const double fc = incoherent_cutoff(optics);
  RealGrid object = real_object(side, cfg.object);
  double test_bins = 0.0;
  if (cfg.sim.test_cutoff_multiple) {
    // Snapped up to a whole DFT bin so the component occupies a single bin
    // and never sits below the requested multiple.
    test_bins = std::ceil(*cfg.sim.test_cutoff_multiple * fc * static_cast<double>(side));
    const double t = cfg.sim.test_orientation_deg * std::numbers::pi / 180.0;
    const double kx = std::round(test_bins * std::cos(t));
    const double ky = std::round(test_bins * std::sin(t));
    for (std::size_t r = 0; r < side; ++r)
      for (std::size_t c = 0; c < side; ++c)
        object(r, c) += cfg.sim.test_amplitude *
                        (1.0 + std::cos(2.0 * std::numbers::pi *
                                        (kx * static_cast<double>(c) + ky * static_cast<double>(r)) /
                                        static_cast<double>(side)));
  }
  SimPatternSpec spec;
  spec.freq_cycles_per_px = cfg.sim.pattern_fraction * fc;
  spec.modulation = cfg.sim.modulation;
  for (double d : cfg.sim.orientations_deg) spec.orientations_rad.push_back(d * std::numbers::pi / 180.0);
  for (double d : cfg.sim.phases_deg) spec.phases_rad.push_back(d * std::numbers::pi / 180.0);
  const SimScene scene{object, gen_sim_patterns(side, spec), make_incoherent_psf(optics).data};
  Dataset ds = generate_sim_dataset(scene, cfg.noise);
  ds.cfg = optics;
  ds.provenance["incoherent_cutoff_cycles_per_px"] = fc;
  ds.provenance["pattern_cycles_per_px"] = spec.freq_cycles_per_px;
  if (cfg.sim.test_cutoff_multiple) ds.provenance["test_component_bins"] = test_bins;
  return ds;
}

Dataset build_spi(const SimulateConfig& cfg) {
  const std::size_t side = cfg.optics.n_high;
  const RealGrid object = real_object(side, cfg.object);
  Dataset ds = generate_spi_dataset(object, gen_spi_patterns(cfg.spi.patterns, cfg.spi.count, side,
                                                             cfg.seed),
                                    cfg.noise);
  ds.cfg.lambda_um = cfg.optics.lambda_um;
  ds.cfg.na = cfg.optics.na;
  ds.cfg.px_high = cfg.optics.px_high;
  return ds;
}

}  // namespace

double incoherent_cutoff(const OpticsConfig& optics) {
  return 2.0 * optics.na / optics.lambda_um * optics.px_high;
}

Dataset build_dataset(const SimulateConfig& cfg) {
  Dataset ds;
  switch (cfg.kind) {
    case DatasetKind::Fp: ds = build_fp(cfg); break;
    case DatasetKind::Sim: ds = build_sim(cfg); break;
    case DatasetKind::Spi: ds = build_spi(cfg); break;
  }
  ds.provenance["seed"] = cfg.seed;
  ds.provenance["object_seed"] = cfg.object.seed;
  return ds;
}

}  // namespace fpnet::io
