#include "gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace fpnet {

FdReport finite_difference_check(
    const std::function<double(std::span<const double>)>& f, std::span<const double> params,
    std::span<const double> analytic, const FdOptions& options,
    const std::function<std::vector<std::int8_t>(std::span<const double>)>& kinks) {
  require(options.step > 0.0, ErrorCode::InvalidArgument, "finite differences: step must be > 0");
  require(params.size() == analytic.size(), ErrorCode::Dimension,
          "finite differences: gradient shape mismatch");

  std::vector<std::size_t> order(params.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (order.size() > options.samples) {
    std::mt19937_64 rng(options.seed);
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[static_cast<std::size_t>(rng() % i)]);
    order.resize(options.samples);
  }

  double scale = 0.0;
  for (double g : analytic) scale = std::max(scale, std::abs(g));
  const double floor = 1e-3 * scale;

  const auto base_kinks = kinks ? kinks(params) : std::vector<std::int8_t>{};
  std::vector<double> probe(params.begin(), params.end());
  FdReport report;
  for (std::size_t idx : order) {
    const double h = options.step;
    probe[idx] = params[idx] + h;
    const double up = f(probe);
    const bool kink_up = kinks && kinks(probe) != base_kinks;
    probe[idx] = params[idx] - h;
    const double down = f(probe);
    const bool kink_down = kinks && kinks(probe) != base_kinks;
    probe[idx] = params[idx];
    if (kink_up || kink_down) {
      ++report.excluded_kinks;
      continue;
    }
    const double fd = (up - down) / (2.0 * h);
    const double denom = std::max({std::abs(fd), std::abs(analytic[idx]), floor, 1e-300});
    report.max_rel_error = std::max(report.max_rel_error, std::abs(fd - analytic[idx]) / denom);
    ++report.checked;
  }
  return report;
}

namespace {

std::vector<double> random_vector(std::size_t count, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> out(count);
  for (auto& v : out) v = dist(rng);
  return out;
}

RealGrid random_grid(std::size_t side, std::mt19937_64& rng, double lo, double hi) {
  return RealGrid(side, random_vector(side * side, rng, lo, hi));
}

OpticsConfig small_optics(std::size_t size, double na) {
  OpticsConfig cfg;
  cfg.n_high = size;
  cfg.stride = 2;
  cfg.px_high = 1.0;
  cfg.lambda_um = 1.0;
  cfg.na = na;
  const double bin = 1.0 / static_cast<double>(size);  // one-bin spectral shift
  cfg.wavevectors = {{0.0, 0.0}, {bin, 0.0}, {0.0, -bin}};
  return cfg;
}

}  // namespace

GradcheckProblem make_gradcheck_problem(LossTarget model, LossNorm norm, std::size_t size,
                                        std::uint64_t seed) {
  require(size >= 8 && size <= 32 && size % 4 == 0, ErrorCode::InvalidArgument,
          "gradcheck: size must be a multiple of 4 in [8, 32]");
  std::mt19937_64 rng(seed);
  GradcheckProblem p;
  switch (model) {
    case LossTarget::Intensity: {
      const OpticsConfig cfg = small_optics(size, 0.2);
      // Measurements from a different random object keep residuals nonzero.
      const FpObject other{random_grid(size, rng, -1.0, 1.0), random_grid(size, rng, -1.0, 1.0)};
      std::vector<RealImage> meas;
      for (std::size_t n = 0; n < cfg.wavevectors.size(); ++n)
        meas.push_back(fp_intensity_forward(other, cfg, n));
      p.objective = std::make_unique<FpIntensityObjective>(cfg, std::move(meas), norm);
      p.params = random_vector(2 * size * size, rng, -1.0, 1.0);
      p.batch = {0, 1, 2};
      break;
    }
    case LossTarget::ExitWave: {
      const OpticsConfig cfg = small_optics(size, 0.15);
      std::vector<RealImage> meas;
      for (std::size_t n = 0; n < cfg.wavevectors.size(); ++n)
        meas.push_back({random_grid(cfg.m_side(), rng, 0.5, 2.0), 2.0});
      auto objective = std::make_unique<FpExitwaveObjective>(cfg, std::move(meas), norm);
      p.params = random_vector(2 * size * size, rng, -2.0, 2.0);
      p.batch = {0, 1, 2};
      objective->freeze(p.params, p.batch);
      p.objective = std::move(objective);
      break;
    }
    case LossTarget::SinglePixel: {
      std::vector<RealGrid> patterns;
      for (std::size_t n = 0; n < 2 * size; ++n) patterns.push_back(random_grid(size, rng, 0.0, 1.0));
      p.params = random_vector(size * size, rng, 0.0, 1.0);
      // Measurements of a nearby object keep residuals on the gradient's scale.
      std::vector<double> nearby = p.params;
      for (auto& v : nearby) v += std::uniform_real_distribution<double>(-0.2, 0.2)(rng);
      const RealGrid other(size, std::move(nearby));
      std::vector<double> meas;
      for (const auto& pattern : patterns) meas.push_back(spi_forward(other, pattern));
      p.objective = std::make_unique<SpiObjective>(std::move(patterns), std::move(meas), norm);
      p.batch.resize(2 * size);
      std::iota(p.batch.begin(), p.batch.end(), std::size_t{0});
      break;
    }
    case LossTarget::Sim: {
      // Compact random kernel around the origin, normalized to unit sum.
      RealGrid psf(size, 0.0);
      double total = 0.0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const double w = std::uniform_real_distribution<double>(0.2, 1.0)(rng);
          psf((static_cast<std::size_t>(dy) + size) % size,
              (static_cast<std::size_t>(dx) + size) % size) = w;
          total += w;
        }
      }
      for (auto& v : psf.values()) v /= total;
      std::vector<RealGrid> patterns;
      for (std::size_t n = 0; n < 3; ++n) patterns.push_back(random_grid(size, rng, 0.0, 1.0));
      p.params = random_vector(size * size, rng, 0.0, 2.0);
      const SimScene other{random_grid(size, rng, 0.0, 2.0), patterns, psf};
      std::vector<RealImage> meas;
      for (std::size_t n = 0; n < 3; ++n) meas.push_back(sim_forward(other, n));
      p.objective = std::make_unique<SimObjective>(std::move(psf), std::move(patterns),
                                                   std::move(meas), norm);
      p.batch = {0, 1, 2};
      break;
    }
  }
  return p;
}

FdReport finite_diff_check(LossTarget model, LossNorm norm, std::size_t size, std::uint64_t seed,
                           double step, bool corrupt_gradient) {
  require(step > 0.0, ErrorCode::InvalidArgument, "finite differences: step must be > 0");
  GradcheckProblem p = make_gradcheck_problem(model, norm, size, seed);
  const Objective& obj = *p.objective;
  std::vector<double> analytic(obj.parameter_count());
  obj.gradient(p.params, p.batch, analytic, {});
  if (corrupt_gradient)
    for (auto& g : analytic) g = g * (1.0 + 1e-3) + 1e-3 * std::abs(g);
  const auto f = [&](std::span<const double> x) { return obj.loss(x, p.batch); };
  const auto kinks = [&](std::span<const double> x) { return obj.kink_signature(x, p.batch); };
  FdOptions options;
  options.step = step;
  options.seed = seed;
  return finite_difference_check(f, p.params, analytic, options, kinks);
}

}  // namespace fpnet
