#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "models.hpp"
#include "optics.hpp"

namespace fpnet {

// Wave vectors ((i - (rows-1)/2) * step, (j - (cols-1)/2) * step), i outer.
std::vector<WaveVector> gen_illumination_grid(std::size_t rows, std::size_t cols, double step,
                                              bool allow_even = false);

// Sines of illumination angles for a planar LED matrix centered on the axis
// at `distance_mm` below the sample.
std::vector<WaveVector> led_wavevectors(std::size_t rows, std::size_t cols, double pitch_mm,
                                        double distance_mm);

struct PhaseRange {
  double lo = 0.0;
  double hi = 1.5707963267948966;
};

// O = A exp(i phi) with phi = lo + p (hi - lo) for a normalized phase map p in [0, 1].
FpObject synth_object(const RealImage& amplitude, const RealImage& phase, PhaseRange range = {});

// Procedural [0, 1] test image: smooth blobs, a ring and bar groups.
RealGrid test_pattern(std::size_t side, std::uint64_t seed);

// Zeroes every centered spectral bin at radius >= radius_bins.
ComplexGrid band_limit(const ComplexGrid& field, double radius_bins);

struct SimPatternSpec {
  double freq_cycles_per_px = 0.1;
  std::vector<double> orientations_rad;
  std::vector<double> phases_rad;
  double modulation = 1.0;
};

// P = 0.5 (1 + modulation cos(2 pi f (x cos t + y sin t) + phase)), clipped at 0.
std::vector<RealGrid> gen_sim_patterns(std::size_t side, const SimPatternSpec& spec);
// Four orientations (0, 45, 90, 135 deg), zero phase, unit modulation, at 0.9x
// of the incoherent cutoff (cycles/px).
SimPatternSpec default_sim_patterns(double incoherent_cutoff_cycles_per_px);

enum class SpiPatternKind { RandomBinary, Orthogonal };

std::vector<RealGrid> gen_spi_patterns(SpiPatternKind kind, std::size_t count, std::size_t side,
                                       std::uint64_t seed);

enum class DatasetKind { Fp, Sim, Spi };
enum class FormationMode { Stride, Crop };

std::string to_string(DatasetKind kind);
std::string to_string(FormationMode mode);
DatasetKind parse_dataset_kind(const std::string& text);
FormationMode parse_formation_mode(const std::string& text);

struct NoiseSpec {
  enum class Kind { None, Gaussian, Poisson };
  Kind kind = Kind::None;
  double sigma = 0.0;     // gaussian: std-dev as a fraction of the peak intensity
  double photons = 0.0;   // poisson: expected count at the peak intensity
  std::uint64_t seed = 0;
};

struct Dataset {
  DatasetKind kind = DatasetKind::Fp;
  FormationMode mode = FormationMode::Stride;
  OpticsConfig cfg;
  std::vector<RealImage> measurements;  // fp, sim
  std::vector<double> scalars;          // spi
  std::vector<RealGrid> patterns;       // sim, spi
  RealGrid psf_inc;                     // sim
  // fp: complex object; sim/spi: real object in o_r with o_i = 0.
  std::optional<FpObject> ground_truth;
  nlohmann::json provenance = nlohmann::json::object();

  std::size_t count() const noexcept {
    return kind == DatasetKind::Spi ? scalars.size() : measurements.size();
  }
  void validate() const;
  bool operator==(const Dataset& other) const;
};

Dataset generate_dataset(const OpticsConfig& cfg, const FpObject& obj, FormationMode mode,
                         const NoiseSpec& noise = {});
Dataset generate_sim_dataset(const SimScene& scene, const NoiseSpec& noise = {});
Dataset generate_spi_dataset(const RealGrid& object, std::vector<RealGrid> patterns,
                             const NoiseSpec& noise = {});

// Rounds every stored array to float32 precision (the on-disk precision).
void quantize_to_float32(Dataset& dataset);

}  // namespace fpnet
