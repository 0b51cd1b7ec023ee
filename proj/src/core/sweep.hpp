#pragma once

#include <optional>
#include <string>
#include <vector>

#include "engine.hpp"

namespace fpnet {

// Each non-empty axis overrides the base config; cells are the Cartesian
// product. An empty axis keeps the base value.
struct SweepAxes {
  std::vector<double> lr;
  std::vector<OptimizerKind> optimizer;
  std::vector<std::size_t> batch_size;
  std::vector<LossSpec> loss_case;
  // When non-empty, every cell runs once per grid entry and keeps the lr with
  // the lowest final full-dataset loss. Mutually exclusive with `lr`.
  std::vector<double> lr_grid;

  void validate() const;
};

struct SweepCell {
  double lr = 0.0;
  OptimizerKind optimizer = OptimizerKind::Adam;
  std::size_t batch_size = 1;
  LossSpec loss;
  std::optional<RunMetrics> metrics;  // empty when the run failed
  std::string error;
};

std::vector<SweepCell> benchmark_sweep(const Dataset& dataset, const ReconConfig& base,
                                       const SweepAxes& axes);

}  // namespace fpnet
