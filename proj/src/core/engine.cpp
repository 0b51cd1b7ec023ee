#include "engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "field.hpp"

namespace fpnet {

std::string to_string(InitKind kind) {
  switch (kind) {
    case InitKind::Ones: return "ones";
    case InitKind::UpsampledCenter: return "upsampled_center";
    case InitKind::Provided: return "provided";
  }
  return "?";
}

InitKind parse_init_kind(const std::string& text) {
  if (text == "ones") return InitKind::Ones;
  if (text == "upsampled_center") return InitKind::UpsampledCenter;
  if (text == "provided") return InitKind::Provided;
  fail(ErrorCode::Config, "unknown init '" + text + "' (expected ones, upsampled_center, provided)");
}

void ReconConfig::validate() const {
  optimizer.validate();
  require(batch_size >= 1, ErrorCode::Config, "batch_size must be >= 1");
  require(threads >= 1, ErrorCode::Config, "threads must be >= 1");
  require(init != InitKind::Provided || initial.has_value(), ErrorCode::Config,
          "init 'provided' needs an initial object");
}

double relative_error(const ComplexGrid& recon, const ComplexGrid& truth) {
  require_same_side(recon.side(), truth.side(), "relative_error");
  const double tt = squared_norm(truth);
  require(tt > 0.0, ErrorCode::Domain, "relative_error: truth has zero norm");
  const cplx c = inner(truth, recon) / tt;
  double err = 0.0;
  for (std::size_t i = 0; i < recon.size(); ++i) err += std::norm(recon[i] - c * truth[i]);
  return std::sqrt(err / tt);
}

namespace {

bool is_fp(LossTarget t) { return t == LossTarget::Intensity || t == LossTarget::ExitWave; }

std::size_t normal_incidence_index(const OpticsConfig& cfg) {
  std::size_t best = 0;
  double best_k = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < cfg.wavevectors.size(); ++n) {
    const double k = std::hypot(cfg.wavevectors[n].kx, cfg.wavevectors[n].ky);
    if (k < best_k) {
      best_k = k;
      best = n;
    }
  }
  return best;
}

// Intensity predicted for a unit object under on-axis illumination.
double unit_response(const OpticsConfig& cfg, LossTarget target) {
  OpticsConfig axial = cfg;
  axial.wavevectors = {{0.0, 0.0}};
  const std::size_t side = cfg.n_high;
  const ComplexGrid ones(side, cplx{1.0, 0.0});
  if (target == LossTarget::Intensity) {
    const FpIntensityModel model(axial);
    return model.predict(model.native_spectrum(ones), 0)[0];
  }
  const FpExitwaveModel model(axial);
  const Spectrum spec = dft2({ones, cfg.px_high});
  return std::norm(model.exit_wave(spec, 0).data[0]);
}

// Union of the shifted apertures on the centered high-res spectrum.
RealGrid synthetic_passband(const OpticsConfig& cfg) {
  const std::size_t side = cfg.n_high;
  const double c = static_cast<double>(side / 2);
  const double radius = cfg.ctf_radius_bins();
  RealGrid mask(side, 0.0);
  for (std::size_t n = 0; n < cfg.wavevectors.size(); ++n) {
    const BinShift s = cfg.shift(n);
    for (std::size_t r = 0; r < side; ++r) {
      for (std::size_t col = 0; col < side; ++col) {
        const double u = static_cast<double>(col) - c - s.x;
        const double v = static_cast<double>(r) - c - s.y;
        if (std::hypot(u, v) < radius) mask(r, col) = 1.0;
      }
    }
  }
  return mask;
}

ComplexGrid project_passband(const ComplexGrid& object, const OpticsConfig& cfg) {
  Spectrum spec = dft2({object, cfg.px_high});
  const RealGrid mask = synthetic_passband(cfg);
  for (std::size_t i = 0; i < spec.data.size(); ++i) spec.data[i] *= mask[i];
  return idft2(spec).data;
}

ComplexGrid fp_initial_object(const Dataset& dataset, const ReconConfig& cfg) {
  const OpticsConfig& optics = dataset.cfg;
  const double p1 = unit_response(optics, cfg.loss.target);
  const RealImage& center = dataset.measurements.at(normal_incidence_index(optics));
  const std::size_t side = optics.n_high;
  if (cfg.init == InitKind::Ones) {
    double mean = 0.0;
    for (double v : center.data.values()) mean += std::max(v, 0.0);
    mean /= static_cast<double>(center.data.size());
    return ComplexGrid(side, cplx{std::sqrt(mean / p1), 0.0});
  }
  const std::size_t up = side / center.side();
  ComplexGrid obj(side);
  for (std::size_t r = 0; r < side; ++r)
    for (std::size_t c = 0; c < side; ++c)
      obj(r, c) = std::sqrt(std::max(center.data(r / up, c / up), 0.0) / p1);
  return project_passband(obj, optics);
}

ComplexGrid sim_initial_object(const Dataset& dataset) {
  // Uniform-illumination estimate: measurements summed over patterns, divided
  // by the summed mean pattern level.
  const std::size_t side = dataset.psf_inc.side();
  RealGrid sum(side, 0.0);
  double level = 0.0;
  for (std::size_t n = 0; n < dataset.measurements.size(); ++n) {
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += dataset.measurements[n].data[i];
    double mean = 0.0;
    for (double v : dataset.patterns[n].values()) mean += v;
    level += mean / static_cast<double>(sum.size());
  }
  require(level > 0.0, ErrorCode::Domain, "sim init: patterns have zero mean");
  ComplexGrid out(side);
  for (std::size_t i = 0; i < sum.size(); ++i) out[i] = sum[i] / level;
  return out;
}

ComplexGrid spi_constant_object(const Dataset& dataset) {
  // Least-squares constant object.
  double num = 0.0;
  double den = 0.0;
  for (std::size_t n = 0; n < dataset.scalars.size(); ++n) {
    double total = 0.0;
    for (double v : dataset.patterns[n].values()) total += v;
    num += dataset.scalars[n] * total;
    den += total * total;
  }
  const double value = den > 0.0 ? num / den : 0.0;
  return ComplexGrid(dataset.patterns.front().side(), cplx{value, 0.0});
}

double band_radius(const Dataset& dataset) { return dataset.cfg.ctf_radius_bins(); }

BandError band_error(const ComplexGrid& recon, const ComplexGrid& truth, double px,
                     double radius) {
  const double tt = squared_norm(truth);
  const cplx c = inner(truth, recon) / tt;
  ComplexGrid scaled = truth;
  for (auto& v : scaled.values()) v *= c;
  const Spectrum t = dft2({scaled, px});
  const Spectrum r = dft2({recon, px});
  const std::size_t side = recon.side();
  const double mid = static_cast<double>(side / 2);
  double err_lo = 0.0, ref_lo = 0.0, err_hi = 0.0, ref_hi = 0.0;
  for (std::size_t row = 0; row < side; ++row) {
    for (std::size_t col = 0; col < side; ++col) {
      const double rho = std::hypot(static_cast<double>(row) - mid, static_cast<double>(col) - mid);
      const double e = std::norm(r.data(row, col) - t.data(row, col));
      const double ref = std::norm(t.data(row, col));
      if (rho < radius) {
        err_lo += e;
        ref_lo += ref;
      } else {
        err_hi += e;
        ref_hi += ref;
      }
    }
  }
  return {ref_lo > 0.0 ? std::sqrt(err_lo / ref_lo) : 0.0,
          ref_hi > 0.0 ? std::sqrt(err_hi / ref_hi) : 0.0};
}

}  // namespace

std::vector<double> initial_parameters(const Dataset& dataset, const ReconConfig& cfg,
                                       const Objective& objective) {
  if (cfg.init == InitKind::Provided) return objective.from_object(*cfg.initial);
  switch (cfg.loss.target) {
    case LossTarget::Intensity:
    case LossTarget::ExitWave:
      return objective.from_object(fp_initial_object(dataset, cfg));
    case LossTarget::Sim:
      if (cfg.init == InitKind::UpsampledCenter) return objective.from_object(sim_initial_object(dataset));
      {
        const ComplexGrid wide = sim_initial_object(dataset);
        cplx mean = 0.0;
        for (const auto& v : wide.values()) mean += v;
        return objective.from_object(
            ComplexGrid(wide.side(), mean / static_cast<double>(wide.size())));
      }
    case LossTarget::SinglePixel:
      return objective.from_object(spi_constant_object(dataset));
  }
  fail(ErrorCode::Config, "unknown model");
}

ReconResult run_reconstruction(const Dataset& dataset, const ReconConfig& cfg,
                               const RunHooks& hooks) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  auto objective = make_objective(dataset, cfg.loss);

  ReconResult result;
  RunMetrics& metrics = result.metrics;
  if (is_fp(cfg.loss.target)) {
    const bool crossed = (cfg.loss.target == LossTarget::Intensity) !=
                         (dataset.mode == FormationMode::Stride);
    if (crossed)
      metrics.warnings.push_back("model '" + to_string(cfg.loss.target) + "' on " +
                                 to_string(dataset.mode) + "-mode data");
  }
  if (cfg.loss.target == LossTarget::SinglePixel && cfg.init == InitKind::UpsampledCenter)
    metrics.warnings.push_back("single-pixel data has no center image; using a constant init");

  std::size_t first_epoch = 0;
  if (hooks.resume) {
    require(hooks.resume->params.size() == objective->parameter_count(), ErrorCode::Dimension,
            "checkpoint parameter count does not match the dataset");
    result.params = hooks.resume->params;
    result.state = hooks.resume->state;
    first_epoch = hooks.resume->epochs_done;
    metrics = hooks.resume->metrics;
  } else {
    result.params = initial_parameters(dataset, cfg, *objective);
    result.state = OptState::zeros(result.params.size());
  }

  const std::optional<ComplexGrid> truth =
      dataset.ground_truth ? std::optional<ComplexGrid>(dataset.ground_truth->complex())
                           : std::nullopt;
  const bool bands = truth && dataset.kind == DatasetKind::Fp;

  BatchSchedule schedule{dataset.count(), cfg.batch_size, cfg.epochs, cfg.order, cfg.seed};
  schedule.validate();
  Batch everything(dataset.count());
  for (std::size_t i = 0; i < everything.size(); ++i) everything[i] = i;

  const Execution exec{cfg.threads, cfg.deterministic};
  std::vector<double> grad(result.params.size());
  bool capped = false;
  for (std::size_t epoch = first_epoch; epoch < cfg.epochs && !capped; ++epoch) {
    if (cfg.max_updates && metrics.update_count >= cfg.max_updates) break;
    const std::vector<Batch> plan = epoch_batches(schedule, epoch);
    for (std::size_t b = 0; b < plan.size(); ++b) {
      if (cfg.max_updates && metrics.update_count >= cfg.max_updates) {
        capped = true;
        break;
      }
      const auto where = [&] {
        return "epoch " + std::to_string(epoch) + ", batch " + std::to_string(b) + " (update " +
               std::to_string(metrics.update_count) + ")";
      };
      const double loss = objective->gradient(result.params, plan[b], grad, exec);
      require(std::isfinite(loss), ErrorCode::NonFinite, "non-finite loss at " + where());
      try {
        step(cfg.optimizer, result.state, result.params, grad);
      } catch (const Error& e) {
        fail(e.code(), std::string(e.what()) + " at " + where());
      }
      metrics.loss_per_update.push_back(loss);
      metrics.epoch_of_update.push_back(epoch);
      ++metrics.update_count;
    }
    const double full = objective->loss(result.params, everything);
    require(std::isfinite(full), ErrorCode::NonFinite,
            "non-finite loss after epoch " + std::to_string(epoch));
    metrics.loss_per_epoch.push_back(full);
    if (truth) {
      const ComplexGrid recon = objective->to_object(result.params);
      metrics.rel_error_per_epoch.push_back(relative_error(recon, *truth));
      if (bands)
        metrics.band_error_per_epoch.push_back(
            band_error(recon, *truth, dataset.cfg.px_high, band_radius(dataset)));
    }
    if (hooks.on_epoch) hooks.on_epoch({result.params, result.state, epoch + 1, metrics});
  }

  result.object = objective->to_object(result.params);
  metrics.wall_time_s +=
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace fpnet
