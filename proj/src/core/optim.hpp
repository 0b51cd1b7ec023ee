#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fpnet {

enum class OptimizerKind { Sgd, Sgdm, RmsProp, Adam };

std::string to_string(OptimizerKind kind);
OptimizerKind parse_optimizer_kind(const std::string& text);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Adam;
  double lr = 0.01;
  double momentum = 0.9;  // sgdm
  double decay = 0.9;     // rmsprop
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

// Per-parameter accumulators. `m` holds the first moment (adam) or the
// momentum buffer (sgdm); `v` the second moment (adam, rmsprop).
struct OptState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step_count = 0;

  static OptState zeros(std::size_t count) {
    return {std::vector<double>(count, 0.0), std::vector<double>(count, 0.0), 0};
  }
};

// Applies one update in place. Rejects mismatched shapes and non-finite
// gradients without touching params or state.
void step(const OptimizerConfig& cfg, OptState& state, std::span<double> params,
          std::span<const double> grad);

enum class BatchOrder { Sequential, Shuffled };

struct BatchSchedule {
  std::size_t n_total = 1;
  std::size_t batch_size = 1;
  std::size_t epochs = 1;
  BatchOrder order = BatchOrder::Sequential;
  std::uint64_t seed = 0;

  void validate() const;
};

using Batch = std::vector<std::size_t>;

// Batches of one epoch (epoch index feeds the shuffle stream).
std::vector<Batch> epoch_batches(const BatchSchedule& schedule, std::size_t epoch);
// All batches of all epochs, in order.
std::vector<Batch> batches(const BatchSchedule& schedule);

std::size_t batches_per_epoch(std::size_t n_total, std::size_t batch_size);
// Optimizer steps applied over a run: epochs * ceil(n_total / batch_size).
std::size_t update_count(std::size_t epochs, std::size_t n_total, std::size_t batch_size);

}  // namespace fpnet
