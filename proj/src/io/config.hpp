#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/engine.hpp"
#include "core/sweep.hpp"

namespace fpnet::io {

// A parsed JSON document that remembers the source line of every object key,
// addressed by dotted path ("optics.na", "axes.lr[2]").
struct LocatedJson {
  nlohmann::json value;
  std::map<std::string, int> lines;
  std::string source;  // file name used in messages

  int line_of(const std::string& path) const;
  [[noreturn]] void fail_at(const std::string& path, const std::string& message) const;
};

LocatedJson parse_located(const std::string& text, const std::string& source);
LocatedJson load_located(const std::filesystem::path& path);

struct ObjectSpec {
  double amplitude_min = 0.5;  // amplitude = min + (1 - min) * pattern
  PhaseRange phase;
  std::optional<double> band_limit_bins;
  std::uint64_t seed = 1;
};

struct SimSceneSpec {
  double pattern_fraction = 0.9;  // pattern frequency / incoherent cutoff
  std::vector<double> orientations_deg{0.0, 45.0, 90.0, 135.0};
  std::vector<double> phases_deg{0.0, 0.0, 0.0, 0.0};
  double modulation = 1.0;
  // Optional sinusoid added to the object at a multiple of the incoherent cutoff.
  std::optional<double> test_cutoff_multiple;
  double test_amplitude = 0.25;
  double test_orientation_deg = 0.0;
};

struct SpiSceneSpec {
  SpiPatternKind patterns = SpiPatternKind::Orthogonal;
  std::size_t count = 256;
};

struct SimulateConfig {
  DatasetKind kind = DatasetKind::Fp;
  std::uint64_t seed = 0;
  OpticsConfig optics;
  FormationMode mode = FormationMode::Stride;
  ObjectSpec object;
  NoiseSpec noise;
  SimSceneSpec sim;
  SpiSceneSpec spi;
  // Measured stack (fp only): one 8/16-bit grayscale PNG per wave vector,
  // resolved against the config file's directory. Replaces simulation.
  std::vector<std::filesystem::path> measurement_pngs;
};

SimulateConfig simulate_config_from(const LocatedJson& doc);

struct ReconFileConfig {
  ReconConfig recon;
  std::size_t checkpoint_every = 0;  // epochs; 0 disables checkpoints
};

ReconFileConfig recon_config_from(const LocatedJson& doc);
// Reads the recon keys from the object at `path` ("" for the root).
ReconFileConfig recon_config_at(const LocatedJson& doc, const std::string& path);

struct SweepConfig {
  ReconConfig base;
  SweepAxes axes;
  double lr_scale = 1.0;  // multiplies every lr and lr_grid entry
};

SweepConfig sweep_config_from(const LocatedJson& doc);

}  // namespace fpnet::io
