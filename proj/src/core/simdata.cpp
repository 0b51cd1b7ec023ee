#include "simdata.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>

#include "fft.hpp"
#include "field.hpp"

namespace fpnet {

std::vector<WaveVector> gen_illumination_grid(std::size_t rows, std::size_t cols, double step,
                                              bool allow_even) {
  require(rows >= 1 && cols >= 1, ErrorCode::Config, "illumination grid: empty grid");
  require(allow_even || (rows % 2 == 1 && cols % 2 == 1), ErrorCode::Config,
          "illumination grid: rows and cols must be odd so that normal incidence exists");
  std::vector<WaveVector> out;
  out.reserve(rows * cols);
  const double ci = (static_cast<double>(rows) - 1.0) / 2.0;
  const double cj = (static_cast<double>(cols) - 1.0) / 2.0;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      out.push_back({(static_cast<double>(i) - ci) * step, (static_cast<double>(j) - cj) * step});
  return out;
}

std::vector<WaveVector> led_wavevectors(std::size_t rows, std::size_t cols, double pitch_mm,
                                        double distance_mm) {
  require(distance_mm > 0.0, ErrorCode::Config, "led geometry: distance must be > 0");
  require(pitch_mm > 0.0, ErrorCode::Config, "led geometry: pitch must be > 0");
  const auto offsets = gen_illumination_grid(rows, cols, pitch_mm, true);
  std::vector<WaveVector> out;
  out.reserve(offsets.size());
  for (const auto& d : offsets) {
    const double r = std::sqrt(d.kx * d.kx + d.ky * d.ky + distance_mm * distance_mm);
    out.push_back({d.kx / r, d.ky / r});
  }
  return out;
}

FpObject synth_object(const RealImage& amplitude, const RealImage& phase, PhaseRange range) {
  require_same_side(amplitude.side(), phase.side(), "synth_object");
  FpObject obj{RealGrid(amplitude.side()), RealGrid(amplitude.side())};
  for (std::size_t i = 0; i < obj.o_r.size(); ++i) {
    const double a = amplitude.data[i];
    const double p = phase.data[i];
    require(a >= 0.0, ErrorCode::Domain, "synth_object: negative amplitude");
    require(p >= 0.0 && p <= 1.0, ErrorCode::Domain,
            "synth_object: phase map must be normalized to [0, 1]");
    const double phi = range.lo + p * (range.hi - range.lo);
    obj.o_r[i] = a * std::cos(phi);
    obj.o_i[i] = a * std::sin(phi);
  }
  return obj;
}

RealGrid test_pattern(std::size_t side, std::uint64_t seed) {
  require(side >= 2, ErrorCode::Dimension, "test_pattern: side must be >= 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double n = static_cast<double>(side);
  RealGrid img(side, 0.0);

  struct Blob {
    double x, y, sigma, amp;
  };
  std::vector<Blob> blobs(10);
  for (auto& b : blobs)
    b = {unit(rng) * n, unit(rng) * n, (0.04 + 0.10 * unit(rng)) * n, 2.0 * unit(rng) - 1.0};

  const double ring_x = (0.3 + 0.4 * unit(rng)) * n;
  const double ring_y = (0.3 + 0.4 * unit(rng)) * n;
  const double ring_r = 0.18 * n;
  const double bar_period = std::max(2.0, n / (12.0 + 8.0 * unit(rng)));

  for (std::size_t r = 0; r < side; ++r) {
    for (std::size_t c = 0; c < side; ++c) {
      const double x = static_cast<double>(c);
      const double y = static_cast<double>(r);
      double v = 0.0;
      for (const auto& b : blobs) {
        // Periodic distance keeps the image smooth across the cyclic boundary.
        double dx = std::abs(x - b.x);
        double dy = std::abs(y - b.y);
        dx = std::min(dx, n - dx);
        dy = std::min(dy, n - dy);
        v += b.amp * std::exp(-(dx * dx + dy * dy) / (2.0 * b.sigma * b.sigma));
      }
      const double dr = std::hypot(x - ring_x, y - ring_y) - ring_r;
      v += 0.6 * std::exp(-dr * dr / (2.0 * 0.02 * n * 0.02 * n));
      // Bar group in the upper-left quadrant.
      if (x > 0.1 * n && x < 0.45 * n && y > 0.1 * n && y < 0.3 * n)
        v += 0.5 * (std::cos(2.0 * std::numbers::pi * x / bar_period) > 0.0 ? 1.0 : 0.0);
      img(r, c) = v;
    }
  }
  const auto [lo, hi] = std::minmax_element(img.values().begin(), img.values().end());
  const double lo_v = *lo;
  const double span = *hi - *lo;
  for (auto& v : img.values()) v = span > 0.0 ? (v - lo_v) / span : 0.0;
  return img;
}

ComplexGrid band_limit(const ComplexGrid& field, double radius_bins) {
  ComplexGrid spec = fft::forward_centered(field);
  const long c = static_cast<long>(field.side() / 2);
  for (std::size_t r = 0; r < spec.side(); ++r) {
    for (std::size_t col = 0; col < spec.side(); ++col) {
      const double u = static_cast<double>(static_cast<long>(col) - c);
      const double v = static_cast<double>(static_cast<long>(r) - c);
      if (std::sqrt(u * u + v * v) >= radius_bins) spec(r, col) = 0.0;
    }
  }
  return fft::inverse_centered(spec);
}

std::vector<RealGrid> gen_sim_patterns(std::size_t side, const SimPatternSpec& spec) {
  require(spec.orientations_rad.size() == spec.phases_rad.size(), ErrorCode::Config,
          "sim patterns: orientation and phase lists differ in length");
  require(spec.modulation >= 0.0 && spec.modulation <= 1.0, ErrorCode::Domain,
          "sim patterns: modulation must lie in [0, 1]");
  std::vector<RealGrid> out;
  for (std::size_t k = 0; k < spec.orientations_rad.size(); ++k) {
    const double ct = std::cos(spec.orientations_rad[k]);
    const double st = std::sin(spec.orientations_rad[k]);
    RealGrid p(side);
    for (std::size_t r = 0; r < side; ++r) {
      for (std::size_t c = 0; c < side; ++c) {
        const double arg = 2.0 * std::numbers::pi * spec.freq_cycles_per_px *
                               (static_cast<double>(c) * ct + static_cast<double>(r) * st) +
                           spec.phases_rad[k];
        p(r, c) = std::max(0.0, 0.5 * (1.0 + spec.modulation * std::cos(arg)));
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

SimPatternSpec default_sim_patterns(double incoherent_cutoff_cycles_per_px) {
  const double deg = std::numbers::pi / 180.0;
  return {0.9 * incoherent_cutoff_cycles_per_px,
          {0.0, 45.0 * deg, 90.0 * deg, 135.0 * deg},
          {0.0, 0.0, 0.0, 0.0},
          1.0};
}

std::vector<RealGrid> gen_spi_patterns(SpiPatternKind kind, std::size_t count, std::size_t side,
                                       std::uint64_t seed) {
  require(side >= 1, ErrorCode::Config, "spi patterns: side must be >= 1");
  const std::size_t pixels = side * side;
  std::vector<RealGrid> out;
  out.reserve(count);
  if (kind == SpiPatternKind::Orthogonal) {
    require(std::has_single_bit(side), ErrorCode::Config,
            "spi patterns: orthogonal family needs a power-of-two side");
    require(count <= pixels, ErrorCode::Config,
            "spi patterns: orthogonal family supports at most side^2 patterns");
    // Sylvester-Hadamard rows: H[k][j] = (-1)^popcount(k & j).
    for (std::size_t k = 0; k < count; ++k) {
      RealGrid p(side);
      for (std::size_t j = 0; j < pixels; ++j) p[j] = (std::popcount(k & j) % 2 == 0) ? 1.0 : -1.0;
      out.push_back(std::move(p));
    }
    return out;
  }
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < count; ++k) {
    RealGrid p(side);
    for (auto& v : p.values()) v = static_cast<double>(rng() >> 63);
    out.push_back(std::move(p));
  }
  return out;
}

std::string to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::Fp: return "fp";
    case DatasetKind::Sim: return "sim";
    case DatasetKind::Spi: return "spi";
  }
  return "unknown";
}

std::string to_string(FormationMode mode) {
  return mode == FormationMode::Stride ? "stride" : "crop";
}

DatasetKind parse_dataset_kind(const std::string& text) {
  if (text == "fp") return DatasetKind::Fp;
  if (text == "sim") return DatasetKind::Sim;
  if (text == "spi") return DatasetKind::Spi;
  fail(ErrorCode::Config, "unknown dataset kind '" + text + "' (expected fp, sim or spi)");
}

FormationMode parse_formation_mode(const std::string& text) {
  if (text == "stride") return FormationMode::Stride;
  if (text == "crop") return FormationMode::Crop;
  fail(ErrorCode::Config, "unknown formation mode '" + text + "' (expected stride or crop)");
}

void Dataset::validate() const {
  if (kind == DatasetKind::Fp) {
    cfg.validate();
    require(measurements.size() == cfg.wavevectors.size(), ErrorCode::Dimension,
            "dataset: measurement count does not match wave-vector count");
    for (const auto& m : measurements)
      require_same_side(m.side(), cfg.m_side(), "dataset measurement");
  }
  if (kind == DatasetKind::Sim) {
    require(measurements.size() == patterns.size(), ErrorCode::Dimension,
            "dataset: one sim measurement per pattern required");
  }
  if (kind == DatasetKind::Spi) {
    require(scalars.size() == patterns.size(), ErrorCode::Dimension,
            "dataset: one spi measurement per pattern required");
  }
  for (const auto& m : measurements)
    for (double v : m.data.values())
      require(v >= 0.0 && std::isfinite(v), ErrorCode::Domain,
              "dataset: intensities must be finite and >= 0");
}

bool Dataset::operator==(const Dataset& other) const {
  const auto same_images = [](const std::vector<RealImage>& a, const std::vector<RealImage>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (!(a[i].data == b[i].data)) return false;
    return true;
  };
  const bool same_truth =
      ground_truth.has_value() == other.ground_truth.has_value() &&
      (!ground_truth || (ground_truth->o_r == other.ground_truth->o_r &&
                         ground_truth->o_i == other.ground_truth->o_i));
  return kind == other.kind && mode == other.mode && cfg.lambda_um == other.cfg.lambda_um &&
         cfg.na == other.cfg.na && cfg.n_high == other.cfg.n_high &&
         cfg.stride == other.cfg.stride && cfg.px_high == other.cfg.px_high &&
         cfg.wavevectors == other.cfg.wavevectors &&
         same_images(measurements, other.measurements) && scalars == other.scalars &&
         patterns == other.patterns && psf_inc == other.psf_inc && same_truth;
}

namespace {

nlohmann::json noise_json(const NoiseSpec& noise) {
  switch (noise.kind) {
    case NoiseSpec::Kind::None: return {{"type", "none"}};
    case NoiseSpec::Kind::Gaussian:
      return {{"type", "gaussian"}, {"sigma", noise.sigma}, {"seed", noise.seed}};
    case NoiseSpec::Kind::Poisson:
      return {{"type", "poisson"}, {"photons", noise.photons}, {"seed", noise.seed}};
  }
  return {};
}

void apply_noise(std::vector<RealImage>& images, const NoiseSpec& noise) {
  if (noise.kind == NoiseSpec::Kind::None) return;
  double peak = 0.0;
  for (const auto& img : images)
    for (double v : img.data.values()) peak = std::max(peak, v);
  if (peak <= 0.0) return;
  std::mt19937_64 rng(noise.seed);
  for (auto& img : images) {
    for (auto& v : img.data.values()) {
      if (noise.kind == NoiseSpec::Kind::Gaussian) {
        require(noise.sigma >= 0.0, ErrorCode::Config, "noise: sigma must be >= 0");
        std::normal_distribution<double> gauss(0.0, noise.sigma * peak);
        v = std::max(0.0, v + gauss(rng));
      } else {
        require(noise.photons > 0.0, ErrorCode::Config, "noise: photons must be > 0");
        const double scale = noise.photons / peak;
        std::poisson_distribution<long> poisson(v * scale);
        v = static_cast<double>(poisson(rng)) / scale;
      }
    }
  }
}

}  // namespace

Dataset generate_dataset(const OpticsConfig& cfg, const FpObject& obj, FormationMode mode,
                         const NoiseSpec& noise) {
  cfg.validate();
  require_same_side(obj.side(), cfg.n_high, "generate_dataset object");
  Dataset ds;
  ds.kind = DatasetKind::Fp;
  ds.mode = mode;
  ds.cfg = cfg;
  const double px_low = cfg.px_high * static_cast<double>(cfg.stride);
  if (mode == FormationMode::Stride) {
    const FpIntensityModel model(cfg);
    const ComplexGrid spec = model.native_spectrum(obj.complex());
    for (std::size_t n = 0; n < model.count(); ++n)
      ds.measurements.push_back({model.predict(spec, n), px_low});
  } else {
    const FpExitwaveModel model(cfg);
    const Spectrum spec = dft2({obj.complex(), cfg.px_high});
    for (std::size_t n = 0; n < model.count(); ++n) {
      const ComplexField psi = model.exit_wave(spec, n);
      RealImage img{RealGrid(psi.side()), px_low};
      for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = std::norm(psi.data[i]);
      ds.measurements.push_back(std::move(img));
    }
  }
  apply_noise(ds.measurements, noise);
  ds.ground_truth = obj;
  ds.provenance = {{"generator", "generate_dataset"},
                   {"mode", to_string(mode)},
                   {"noise", noise_json(noise)}};
  return ds;
}

Dataset generate_sim_dataset(const SimScene& scene, const NoiseSpec& noise) {
  scene.validate();
  Dataset ds;
  ds.kind = DatasetKind::Sim;
  ds.cfg.n_high = scene.object.side();
  ds.cfg.stride = 1;
  for (std::size_t n = 0; n < scene.patterns.size(); ++n) {
    RealImage img = sim_forward(scene, n);
    for (auto& v : img.data.values()) v = std::max(v, 0.0);  // clear the -1e-16 FFT floor
    ds.measurements.push_back(std::move(img));
  }
  apply_noise(ds.measurements, noise);
  ds.patterns = scene.patterns;
  ds.psf_inc = scene.psf_inc;
  ds.ground_truth = FpObject{scene.object, RealGrid(scene.object.side())};
  ds.provenance = {{"generator", "generate_sim_dataset"}, {"noise", noise_json(noise)}};
  return ds;
}

Dataset generate_spi_dataset(const RealGrid& object, std::vector<RealGrid> patterns,
                             const NoiseSpec& noise) {
  Dataset ds;
  ds.kind = DatasetKind::Spi;
  ds.cfg.n_high = object.side();
  ds.cfg.stride = 1;
  std::mt19937_64 rng(noise.seed);
  for (const auto& p : patterns) {
    double v = spi_forward(object, p);
    if (noise.kind == NoiseSpec::Kind::Gaussian) {
      std::normal_distribution<double> gauss(0.0, noise.sigma);
      v += gauss(rng);
    }
    ds.scalars.push_back(v);
  }
  ds.patterns = std::move(patterns);
  ds.ground_truth = FpObject{object, RealGrid(object.side())};
  ds.provenance = {{"generator", "generate_spi_dataset"}, {"noise", noise_json(noise)}};
  return ds;
}

void quantize_to_float32(Dataset& dataset) {
  const auto q = [](double v) { return static_cast<double>(static_cast<float>(v)); };
  for (auto& m : dataset.measurements)
    for (auto& v : m.data.values()) v = q(v);
  for (auto& v : dataset.scalars) v = q(v);
  for (auto& p : dataset.patterns)
    for (auto& v : p.values()) v = q(v);
  for (auto& v : dataset.psf_inc.values()) v = q(v);
  if (dataset.ground_truth) {
    for (auto& v : dataset.ground_truth->o_r.values()) v = q(v);
    for (auto& v : dataset.ground_truth->o_i.values()) v = q(v);
  }
}

}  // namespace fpnet
