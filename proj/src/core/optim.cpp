#include "optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "error.hpp"

namespace fpnet {

std::string to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::Sgd: return "sgd";
    case OptimizerKind::Sgdm: return "sgdm";
    case OptimizerKind::RmsProp: return "rmsprop";
    case OptimizerKind::Adam: return "adam";
  }
  return "unknown";
}

OptimizerKind parse_optimizer_kind(const std::string& text) {
  if (text == "sgd") return OptimizerKind::Sgd;
  if (text == "sgdm") return OptimizerKind::Sgdm;
  if (text == "rmsprop") return OptimizerKind::RmsProp;
  if (text == "adam") return OptimizerKind::Adam;
  fail(ErrorCode::Config,
       "unknown optimizer '" + text + "' (expected sgd, sgdm, rmsprop or adam)");
}

void OptimizerConfig::validate() const {
  const auto unit = [](double x) { return x >= 0.0 && x < 1.0; };
  require(lr > 0.0 && std::isfinite(lr), ErrorCode::Config, "optimizer: lr must be > 0");
  require(unit(momentum), ErrorCode::Config, "optimizer: momentum must lie in [0, 1)");
  require(unit(decay), ErrorCode::Config, "optimizer: decay must lie in [0, 1)");
  require(unit(beta1) && unit(beta2), ErrorCode::Config,
          "optimizer: beta1 and beta2 must lie in [0, 1)");
  require(epsilon > 0.0, ErrorCode::Config, "optimizer: epsilon must be > 0");
}

void step(const OptimizerConfig& cfg, OptState& state, std::span<double> params,
          std::span<const double> grad) {
  const std::size_t n = params.size();
  require(grad.size() == n, ErrorCode::Dimension, "optimizer step: gradient shape mismatch");
  const bool needs_m = cfg.kind == OptimizerKind::Sgdm || cfg.kind == OptimizerKind::Adam;
  const bool needs_v = cfg.kind == OptimizerKind::RmsProp || cfg.kind == OptimizerKind::Adam;
  if (needs_m && state.m.empty()) state.m.assign(n, 0.0);
  if (needs_v && state.v.empty()) state.v.assign(n, 0.0);
  require((!needs_m || state.m.size() == n) && (!needs_v || state.v.size() == n),
          ErrorCode::Dimension, "optimizer step: state shape mismatch");
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(grad[i]))
      fail(ErrorCode::NonFinite,
           "optimizer step: non-finite gradient at parameter " + std::to_string(i));

  const double lr = cfg.lr;
  switch (cfg.kind) {
    case OptimizerKind::Sgd:
      for (std::size_t i = 0; i < n; ++i) params[i] -= lr * grad[i];
      break;
    case OptimizerKind::Sgdm:
      for (std::size_t i = 0; i < n; ++i) {
        state.m[i] = cfg.momentum * state.m[i] + grad[i];
        params[i] -= lr * state.m[i];
      }
      break;
    case OptimizerKind::RmsProp:
      for (std::size_t i = 0; i < n; ++i) {
        state.v[i] = cfg.decay * state.v[i] + (1.0 - cfg.decay) * grad[i] * grad[i];
        params[i] -= lr * grad[i] / (std::sqrt(state.v[i]) + cfg.epsilon);
      }
      break;
    case OptimizerKind::Adam: {
      const auto t = static_cast<double>(state.step_count + 1);
      const double c1 = 1.0 - std::pow(cfg.beta1, t);
      const double c2 = 1.0 - std::pow(cfg.beta2, t);
      for (std::size_t i = 0; i < n; ++i) {
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grad[i];
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
        const double m_hat = state.m[i] / c1;
        const double v_hat = state.v[i] / c2;
        params[i] -= lr * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
      }
      break;
    }
  }
  ++state.step_count;
}

void BatchSchedule::validate() const {
  require(n_total >= 1, ErrorCode::Config, "schedule: no measurements");
  require(batch_size >= 1 && batch_size <= n_total, ErrorCode::Config,
          "schedule: batch_size must lie in [1, " + std::to_string(n_total) + "]");
}

std::size_t batches_per_epoch(std::size_t n_total, std::size_t batch_size) {
  require(batch_size >= 1, ErrorCode::Config, "batch_size must be >= 1");
  return (n_total + batch_size - 1) / batch_size;
}

std::size_t update_count(std::size_t epochs, std::size_t n_total, std::size_t batch_size) {
  return epochs * batches_per_epoch(n_total, batch_size);
}

std::vector<Batch> epoch_batches(const BatchSchedule& schedule, std::size_t epoch) {
  schedule.validate();
  std::vector<std::size_t> order(schedule.n_total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (schedule.order == BatchOrder::Shuffled) {
    std::seed_seq seq{static_cast<std::uint32_t>(schedule.seed),
                      static_cast<std::uint32_t>(schedule.seed >> 32),
                      static_cast<std::uint32_t>(epoch)};
    std::mt19937_64 rng(seq);
    // Fisher-Yates with an explicit draw so the sequence does not depend on
    // the standard library's shuffle implementation.
    for (std::size_t i = order.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng() % i);
      std::swap(order[i - 1], order[j]);
    }
  }
  std::vector<Batch> out;
  for (std::size_t start = 0; start < order.size(); start += schedule.batch_size) {
    const std::size_t stop = std::min(order.size(), start + schedule.batch_size);
    out.emplace_back(order.begin() + static_cast<long>(start),
                     order.begin() + static_cast<long>(stop));
  }
  return out;
}

std::vector<Batch> batches(const BatchSchedule& schedule) {
  std::vector<Batch> out;
  for (std::size_t e = 0; e < schedule.epochs; ++e) {
    auto epoch = epoch_batches(schedule, e);
    out.insert(out.end(), std::make_move_iterator(epoch.begin()),
               std::make_move_iterator(epoch.end()));
  }
  return out;
}

}  // namespace fpnet
