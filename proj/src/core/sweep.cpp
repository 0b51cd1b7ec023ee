#include "sweep.hpp"

#include <limits>

namespace fpnet {

void SweepAxes::validate() const {
  require(!lr.empty() || !optimizer.empty() || !batch_size.empty() || !loss_case.empty() ||
              !lr_grid.empty(),
          ErrorCode::Config, "sweep: every axis is empty");
  require(lr.empty() || lr_grid.empty(), ErrorCode::Config,
          "sweep: 'lr' and 'lr_grid' cannot both be set");
}

namespace {

template <class T>
std::vector<T> or_base(const std::vector<T>& axis, const T& base) {
  return axis.empty() ? std::vector<T>{base} : axis;
}

double final_loss(const RunMetrics& m) {
  return m.loss_per_epoch.empty() ? std::numeric_limits<double>::infinity()
                                  : m.loss_per_epoch.back();
}

}  // namespace

std::vector<SweepCell> benchmark_sweep(const Dataset& dataset, const ReconConfig& base,
                                       const SweepAxes& axes) {
  axes.validate();
  std::vector<SweepCell> cells;
  for (const LossSpec& loss : or_base(axes.loss_case, base.loss)) {
    for (OptimizerKind kind : or_base(axes.optimizer, base.optimizer.kind)) {
      for (std::size_t batch : or_base(axes.batch_size, base.batch_size)) {
        const std::vector<double> lrs = !axes.lr_grid.empty() ? axes.lr_grid
                                                              : or_base(axes.lr, base.optimizer.lr);
        const bool pick_best = !axes.lr_grid.empty();
        std::vector<SweepCell> candidates;
        for (double lr : lrs) {
          SweepCell cell;
          cell.lr = lr;
          cell.optimizer = kind;
          cell.batch_size = batch;
          cell.loss = loss;
          ReconConfig cfg = base;
          cfg.loss = loss;
          cfg.optimizer.kind = kind;
          cfg.optimizer.lr = lr;
          cfg.batch_size = batch;
          try {
            cell.metrics = run_reconstruction(dataset, cfg).metrics;
          } catch (const std::exception& e) {
            cell.error = e.what();
          }
          candidates.push_back(std::move(cell));
        }
        if (!pick_best) {
          for (auto& c : candidates) cells.push_back(std::move(c));
          continue;
        }
        std::size_t best = 0;
        double best_loss = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < candidates.size(); ++i) {
          if (!candidates[i].metrics) continue;
          const double l = final_loss(*candidates[i].metrics);
          if (l < best_loss) {
            best_loss = l;
            best = i;
          }
        }
        cells.push_back(std::move(candidates[best]));
      }
    }
  }
  return cells;
}

}  // namespace fpnet
