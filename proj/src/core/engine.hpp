#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "objective.hpp"
#include "optim.hpp"
#include "simdata.hpp"

namespace fpnet {

enum class InitKind { Ones, UpsampledCenter, Provided };

std::string to_string(InitKind kind);
InitKind parse_init_kind(const std::string& text);

struct ReconConfig {
  LossSpec loss;  // loss.target selects the model
  OptimizerConfig optimizer;
  std::size_t batch_size = 1;
  std::size_t epochs = 20;
  BatchOrder order = BatchOrder::Sequential;
  std::uint64_t seed = 0;
  InitKind init = InitKind::UpsampledCenter;
  std::optional<ComplexGrid> initial;  // spatial object, used with InitKind::Provided
  bool deterministic = true;
  unsigned threads = 1;
  std::size_t max_updates = 0;  // stop after this many steps; 0 = run every epoch

  void validate() const;
};

// Relative error of the scale/phase-aligned reconstruction in the spectral
// band below (low) and above (high) the objective cutoff.
struct BandError {
  double low = 0.0;
  double high = 0.0;
};

struct RunMetrics {
  std::vector<double> loss_per_update;      // batch loss evaluated before each step
  std::vector<std::size_t> epoch_of_update;
  std::vector<double> loss_per_epoch;       // full-dataset loss after each epoch
  std::vector<double> rel_error_per_epoch;  // empty without ground truth
  std::vector<BandError> band_error_per_epoch;
  std::vector<std::string> warnings;
  double wall_time_s = 0.0;
  std::size_t update_count = 0;
};

struct Checkpoint {
  std::vector<double> params;
  OptState state;
  std::size_t epochs_done = 0;
  RunMetrics metrics;
};

struct ReconResult {
  ComplexGrid object;  // spatial domain
  std::vector<double> params;
  OptState state;
  RunMetrics metrics;
};

struct RunHooks {
  std::function<void(const Checkpoint&)> on_epoch;  // after metrics are recorded
  const Checkpoint* resume = nullptr;
};

// min_c ||recon - c truth|| / ||truth|| with c = <truth, recon> / ||truth||^2.
double relative_error(const ComplexGrid& recon, const ComplexGrid& truth);

// Initial parameters for `cfg` on `dataset`.
std::vector<double> initial_parameters(const Dataset& dataset, const ReconConfig& cfg,
                                       const Objective& objective);

ReconResult run_reconstruction(const Dataset& dataset, const ReconConfig& cfg,
                               const RunHooks& hooks = {});

}  // namespace fpnet
