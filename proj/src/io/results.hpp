#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/sweep.hpp"

namespace fpnet::io {

inline constexpr const char* kPhaseRendering = "phase [-pi, pi] mapped linearly to gray [0, 255]";
inline constexpr const char* kAmplitudeRendering = "amplitude [0, max] mapped linearly to gray [0, 255]";

// update_index, epoch (1-based), loss, rel_error; rel_error is filled on the last update
// of each epoch when a ground truth exists.
std::string loss_csv(const RunMetrics& metrics);
// epoch, loss, rel_error, band_low, band_high (1-based epochs).
std::string epochs_csv(const RunMetrics& metrics);

nlohmann::json recon_config_json(const ReconConfig& cfg);
nlohmann::json metrics_json(const RunMetrics& metrics);
RunMetrics metrics_from_json(const nlohmann::json& j);

// Writes amplitude.png, phase.png, object.f32, loss.csv, epochs.csv and
// summary.json. `extra` is merged into the summary.
void write_recon_outputs(const std::filesystem::path& dir, const ReconResult& result,
                         const ReconConfig& cfg, const nlohmann::json& extra = {});

// Parameters and optimizer moments as float32 planes plus state.json.
// Float32 storage makes a resumed run close to, not bit-identical with, an
// uninterrupted one.
void save_checkpoint(const std::filesystem::path& dir, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& dir);

std::string sweep_label(const SweepCell& cell, const std::string& axis);
// Long format: one row per recorded loss value of every cell.
std::string sweep_series_csv(const std::vector<SweepCell>& cells);
// One row per cell with its final values and error string.
std::string sweep_cells_csv(const std::vector<SweepCell>& cells);
// Writes sweep_series.csv, sweep_cells.csv and, for each populated axis,
// loss-vs-epoch and loss-vs-update PNGs. Returns the written file names.
std::vector<std::string> write_sweep_outputs(const std::filesystem::path& dir,
                                             const std::vector<SweepCell>& cells,
                                             const SweepAxes& axes);

}  // namespace fpnet::io
