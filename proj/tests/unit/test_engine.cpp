#include <doctest.h>

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>

#include "core/engine.hpp"
#include "core/error.hpp"
#include "core/objective.hpp"
#include "core/sweep.hpp"
#include "helpers.hpp"
#include "io/config.hpp"
#include "io/scenario.hpp"

using namespace fpnet;
using testutil::max_abs_diff;
using testutil::random_complex;

namespace {

const Dataset& desk(const char* preset) {
  static std::map<std::string, Dataset> cache;
  auto it = cache.find(preset);
  if (it == cache.end()) {
    Dataset d = io::build_dataset(
        io::simulate_config_from(io::load_located(std::string(FPNET_PRESETS_DIR) + "/" + preset)));
    quantize_to_float32(d);
    it = cache.emplace(preset, std::move(d)).first;
  }
  return it->second;
}

Dataset small_crop() {
  OpticsConfig cfg;
  cfg.n_high = 64;
  cfg.stride = 4;
  cfg.wavevectors = gen_illumination_grid(5, 5, 0.05);
  const FpObject obj = synth_object({test_pattern(64, 1), 1.0}, {test_pattern(64, 2), 1.0});
  return generate_dataset(cfg, obj, FormationMode::Crop);
}

ReconConfig adam(LossTarget target, LossNorm norm, double lr, std::size_t epochs) {
  ReconConfig cfg;
  cfg.loss = {norm, target};
  cfg.optimizer.kind = OptimizerKind::Adam;
  cfg.optimizer.lr = lr;
  cfg.epochs = epochs;
  return cfg;
}

}  // namespace

TEST_CASE("relative_error") {
  const ComplexGrid truth = random_complex(16, 1);
  CHECK(relative_error(truth, truth) == 0.0);

  ComplexGrid rotated = truth;
  for (auto& v : rotated.values()) v *= std::polar(2.5, 1.1);
  CHECK(relative_error(rotated, truth) < 1e-14);

  // Component orthogonal to the truth with a tenth of its norm.
  ComplexGrid p = random_complex(16, 2);
  const cplx c = inner(truth, p) / squared_norm(truth);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] -= c * truth[i];
  const double scale = 0.1 * std::sqrt(squared_norm(truth) / squared_norm(p));
  ComplexGrid noisy = truth;
  for (std::size_t i = 0; i < p.size(); ++i) noisy[i] += scale * p[i];
  CHECK(relative_error(noisy, truth) == doctest::Approx(0.1).epsilon(1e-12));

  const ComplexGrid other = random_complex(16, 3);
  CHECK(relative_error(other, truth) <= std::sqrt(squared_norm(other) / squared_norm(truth)) + 1.0);

  try {
    (void)relative_error(truth, ComplexGrid(16));
    FAIL("expected a domain error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Domain);
  }
}

TEST_CASE("zero epochs returns the initialization") {
  const Dataset d = small_crop();
  for (LossTarget target : {LossTarget::Intensity, LossTarget::ExitWave}) {
    const ReconConfig cfg = adam(target, LossNorm::L2, 0.01, 0);
    const ReconResult r = run_reconstruction(d, cfg);
    const auto objective = make_objective(d, cfg.loss);
    CHECK(r.params == initial_parameters(d, cfg, *objective));
    CHECK(r.metrics.loss_per_update.empty());
    CHECK(r.metrics.loss_per_epoch.empty());
    CHECK(r.metrics.update_count == 0);
  }
}

TEST_CASE("exit-wave model is stationary at the true spectrum") {
  const Dataset d = small_crop();
  // Plain SGD: Adam would normalize rounding-level gradients up to lr-sized steps.
  ReconConfig cfg = adam(LossTarget::ExitWave, LossNorm::L2, 0.5, 1);
  cfg.optimizer.kind = OptimizerKind::Sgd;
  cfg.init = InitKind::Provided;
  cfg.initial = d.ground_truth->complex();
  const ReconResult r = run_reconstruction(d, cfg);
  REQUIRE(r.metrics.loss_per_epoch.size() == 1);
  CHECK(r.metrics.loss_per_epoch[0] <= 1e-10);
  CHECK(max_abs_diff(r.object, *cfg.initial) < 1e-10);
}

TEST_CASE("run_reconstruction leaves the dataset alone and is deterministic") {
  const Dataset d = small_crop();
  const Dataset copy = d;
  ReconConfig cfg = adam(LossTarget::Intensity, LossNorm::L1, 0.002, 2);
  cfg.order = BatchOrder::Shuffled;
  cfg.seed = 5;
  const ReconResult a = run_reconstruction(d, cfg);
  const ReconResult b = run_reconstruction(d, cfg);
  CHECK(d == copy);
  CHECK(a.params == b.params);
  CHECK(a.metrics.loss_per_update == b.metrics.loss_per_update);
  CHECK(a.metrics.loss_per_epoch == b.metrics.loss_per_epoch);
  CHECK(a.metrics.update_count == update_count(2, 25, 1));
  CHECK(a.metrics.rel_error_per_epoch.size() == 2);
}

TEST_CASE("max_updates stops mid-epoch") {
  const Dataset d = small_crop();
  ReconConfig cfg = adam(LossTarget::Intensity, LossNorm::L1, 0.002, 5);
  cfg.batch_size = 4;
  cfg.max_updates = 10;
  const ReconResult r = run_reconstruction(d, cfg);
  CHECK(r.metrics.update_count == 10);
  CHECK(r.metrics.loss_per_update.size() == 10);
  CHECK(r.metrics.loss_per_epoch.size() == 2);
}

TEST_CASE("resuming from a checkpoint matches an uninterrupted run") {
  const Dataset d = small_crop();
  ReconConfig cfg = adam(LossTarget::ExitWave, LossNorm::L2, 0.03, 4);
  cfg.order = BatchOrder::Shuffled;
  cfg.seed = 2;
  std::optional<Checkpoint> saved;
  RunHooks hooks;
  hooks.on_epoch = [&](const Checkpoint& c) {
    if (c.epochs_done == 2) saved = c;
  };
  const ReconResult full = run_reconstruction(d, cfg, hooks);
  REQUIRE(saved.has_value());
  RunHooks resume;
  resume.resume = &*saved;
  const ReconResult resumed = run_reconstruction(d, cfg, resume);
  CHECK(resumed.params == full.params);
  CHECK(resumed.metrics.loss_per_epoch == full.metrics.loss_per_epoch);
  CHECK(resumed.metrics.update_count == full.metrics.update_count);
}

TEST_CASE("non-finite losses abort with the batch index") {
  Dataset d = small_crop();
  d.measurements[3].data(0, 0) = std::numeric_limits<double>::infinity();
  try {
    (void)run_reconstruction(d, adam(LossTarget::Intensity, LossNorm::L2, 0.01, 1));
    FAIL("expected a non-finite error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFinite);
    CHECK(std::string(e.what()).find("batch") != std::string::npos);
  }
}

TEST_CASE("desk-scale Adam run drops the epoch loss tenfold by epoch 20") {
  ReconConfig cfg = adam(LossTarget::ExitWave, LossNorm::L2, 0.03, 20);
  cfg.order = BatchOrder::Shuffled;
  cfg.seed = 7;
  const ReconResult r = run_reconstruction(desk("desk-crop.json"), cfg);
  REQUIRE(r.metrics.loss_per_epoch.size() == 20);
  CHECK(r.metrics.loss_per_epoch[19] * 10.0 < r.metrics.loss_per_epoch[0]);
}

TEST_CASE("benchmark_sweep") {
  const Dataset d = small_crop();
  const ReconConfig base = adam(LossTarget::Intensity, LossNorm::L1, 0.002, 2);

  SUBCASE("single cell equals a plain run") {
    SweepAxes axes;
    axes.lr = {0.002};
    const auto cells = benchmark_sweep(d, base, axes);
    REQUIRE(cells.size() == 1);
    REQUIRE(cells[0].metrics.has_value());
    const ReconResult r = run_reconstruction(d, base);
    CHECK(cells[0].metrics->loss_per_update == r.metrics.loss_per_update);
    CHECK(cells[0].metrics->loss_per_epoch == r.metrics.loss_per_epoch);
  }
  SUBCASE("cartesian product") {
    SweepAxes axes;
    axes.optimizer = {OptimizerKind::Adam, OptimizerKind::Sgd};
    axes.batch_size = {1, 5};
    axes.lr = {1e-3, 2e-3, 5e-3};
    const auto cells = benchmark_sweep(d, base, axes);
    CHECK(cells.size() == 12);
  }
  SUBCASE("lr grid keeps the best final loss") {
    SweepAxes axes;
    axes.lr_grid = {1e-9, 2e-3};
    const auto cells = benchmark_sweep(d, base, axes);
    REQUIRE(cells.size() == 1);
    CHECK(cells[0].lr == 2e-3);
  }
  SUBCASE("failed cells are recorded") {
    SweepAxes axes;
    axes.batch_size = {1, 100};
    const auto cells = benchmark_sweep(d, base, axes);
    REQUIRE(cells.size() == 2);
    CHECK(cells[0].metrics.has_value());
    CHECK(!cells[1].metrics.has_value());
    CHECK(!cells[1].error.empty());
  }
  SUBCASE("empty axes are rejected") {
    CHECK_THROWS_AS(benchmark_sweep(d, base, {}), Error);
  }
}
