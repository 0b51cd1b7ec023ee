#include "grad.hpp"

#include <cmath>

namespace fpnet {

std::string to_string(LossNorm norm) { return norm == LossNorm::L1 ? "L1" : "L2"; }

std::string to_string(LossTarget target) {
  switch (target) {
    case LossTarget::Intensity: return "intensity";
    case LossTarget::ExitWave: return "exitwave";
    case LossTarget::SinglePixel: return "spi";
    case LossTarget::Sim: return "sim";
  }
  return "unknown";
}

LossNorm parse_loss_norm(const std::string& text) {
  if (text == "L1" || text == "l1") return LossNorm::L1;
  if (text == "L2" || text == "l2") return LossNorm::L2;
  fail(ErrorCode::Config, "unknown loss norm '" + text + "' (expected L1 or L2)");
}

LossTarget parse_loss_target(const std::string& text) {
  if (text == "intensity") return LossTarget::Intensity;
  if (text == "exitwave") return LossTarget::ExitWave;
  if (text == "spi") return LossTarget::SinglePixel;
  if (text == "sim") return LossTarget::Sim;
  fail(ErrorCode::Config,
       "unknown model '" + text + "' (expected intensity, exitwave, spi or sim)");
}

double loss_intensity(std::span<const RealImage> meas, std::span<const RealImage> pred,
                      LossNorm norm) {
  require(meas.size() == pred.size(), ErrorCode::Dimension,
          "loss_intensity: measurement and prediction counts differ");
  double total = 0.0;
  for (std::size_t n = 0; n < meas.size(); ++n) {
    require_same_side(meas[n].side(), pred[n].side(), "loss_intensity");
    for (std::size_t i = 0; i < meas[n].data.size(); ++i)
      total += residual_loss(meas[n].data[i] - pred[n].data[i], norm);
  }
  return total;
}

double loss_exitwave(std::span<const Spectrum> phi_update, std::span<const Spectrum> phi_hat,
                     LossNorm norm) {
  require(phi_update.size() == phi_hat.size(), ErrorCode::Dimension,
          "loss_exitwave: list lengths differ");
  double total = 0.0;
  for (std::size_t n = 0; n < phi_update.size(); ++n) {
    require_same_side(phi_update[n].side(), phi_hat[n].side(), "loss_exitwave");
    for (std::size_t i = 0; i < phi_hat[n].data.size(); ++i) {
      const double mag2 = std::norm(phi_update[n].data[i] - phi_hat[n].data[i]);
      total += norm == LossNorm::L2 ? mag2 : std::sqrt(mag2);
    }
  }
  return total;
}

namespace {

void require_batch(std::span<const std::size_t> batch, std::size_t available, const char* who) {
  require(!batch.empty(), ErrorCode::Domain, std::string(who) + ": empty batch");
  for (std::size_t n : batch)
    require(n < available, ErrorCode::InvalidArgument,
            std::string(who) + ": batch index " + std::to_string(n) + " out of range");
}

ChannelGradient split_channels(const ComplexGrid& wirtinger, double loss) {
  ChannelGradient out{RealGrid(wirtinger.side()), RealGrid(wirtinger.side()), loss};
  for (std::size_t i = 0; i < wirtinger.size(); ++i) {
    out.d_real[i] = 2.0 * wirtinger[i].real();
    out.d_imag[i] = 2.0 * wirtinger[i].imag();
  }
  return out;
}

struct Contribution {
  double loss = 0.0;
  ComplexGrid acc;
};

}  // namespace

ChannelGradient grad_fp_intensity(const FpObject& obj, const FpIntensityModel& model,
                                  std::span<const std::size_t> batch,
                                  std::span<const RealImage> meas, LossNorm norm,
                                  const Execution& exec) {
  require_batch(batch, model.count(), "grad_fp_intensity");
  require(meas.size() == model.count(), ErrorCode::Dimension,
          "grad_fp_intensity: measurement count does not match illumination count");
  const OpticsConfig& cfg = model.optics();
  const std::size_t m = cfg.m_side();
  const ComplexGrid spectrum = model.native_spectrum(obj.complex());

  ComplexGrid acc(cfg.n_high);
  double loss = 0.0;
  parallel_fold<Contribution>(
      batch.size(), exec,
      [&](std::size_t j) {
        const std::size_t n = batch[j];
        require_same_side(meas[n].side(), m, "grad_fp_intensity measurement");
        const ComplexGrid psi = model.lattice_field(spectrum, n);
        // W = zero_upsample(g) * psi, handled on the sensor lattice.
        Contribution c{0.0, ComplexGrid(cfg.n_high)};
        ComplexGrid w(m);
        for (std::size_t i = 0; i < w.size(); ++i) {
          const double residual = meas[n].data[i] - std::norm(psi[i]);
          c.loss += residual_loss(residual, norm);
          w[i] = prediction_sensitivity(residual, norm) * psi[i];
        }
        model.accumulate_lattice_adjoint(w, n, c.acc);
        return c;
      },
      [&](Contribution&& c) {
        loss += c.loss;
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += c.acc[i];
      });
  return split_channels(model.finish_adjoint(std::move(acc)), loss);
}

std::vector<Spectrum> exitwave_targets(const FpSpectrumObject& obj,
                                       const FpExitwaveModel& model,
                                       std::span<const std::size_t> batch,
                                       std::span<const RealImage> sqrt_meas) {
  require_batch(batch, model.count(), "exitwave_targets");
  require(sqrt_meas.size() == model.count(), ErrorCode::Dimension,
          "exitwave_targets: measurement count does not match illumination count");
  const Spectrum spectrum{obj.complex(), model.optics().dk(), true};
  std::vector<Spectrum> targets;
  targets.reserve(batch.size());
  for (std::size_t n : batch)
    targets.push_back(fmp_project(model.exit_wave(spectrum, n), sqrt_meas[n]));
  return targets;
}

ChannelGradient grad_fp_exitwave_frozen(const FpSpectrumObject& obj,
                                        const FpExitwaveModel& model,
                                        std::span<const std::size_t> batch,
                                        std::span<const Spectrum> targets, LossNorm norm) {
  require_batch(batch, model.count(), "grad_fp_exitwave");
  require(targets.size() == batch.size(), ErrorCode::Dimension,
          "grad_fp_exitwave: one target per batch entry required");
  const OpticsConfig& cfg = model.optics();
  const std::size_t side = cfg.n_high;
  const std::size_t m = cfg.m_side();
  const Spectrum spectrum{obj.complex(), cfg.dk(), true};
  const Spectrum& ctf0 = model.ctf0();

  ComplexGrid wirtinger(side);
  double loss = 0.0;
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const std::size_t n = batch[j];
    const Spectrum phi_hat = model.exit_spectrum(spectrum, n);
    require_same_side(targets[j].side(), m, "grad_fp_exitwave target");
    const BinShift sh = model.shift(n);
    const auto row0 = static_cast<std::size_t>(static_cast<long>(side / 2) + sh.y -
                                               static_cast<long>(m / 2));
    const auto col0 = static_cast<std::size_t>(static_cast<long>(side / 2) + sh.x -
                                               static_cast<long>(m / 2));
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t c = 0; c < m; ++c) {
        const cplx residual = phi_hat.data(r, c) - targets[j].data(r, c);
        const double mag = std::abs(residual);
        cplx dz;
        if (norm == LossNorm::L2) {
          loss += mag * mag;
          dz = residual;
        } else {
          loss += mag;
          dz = mag < 1e-12 ? cplx{} : residual / (2.0 * mag);
        }
        wirtinger(row0 + r, col0 + c) += std::conj(ctf0.data(r, c)) * dz;
      }
    }
  }
  return split_channels(wirtinger, loss);
}

ChannelGradient grad_fp_exitwave(const FpSpectrumObject& obj, const FpExitwaveModel& model,
                                 std::span<const std::size_t> batch,
                                 std::span<const RealImage> sqrt_meas, LossNorm norm,
                                 const Execution& exec) {
  require_batch(batch, model.count(), "grad_fp_exitwave");
  if (exec.threads <= 1 || batch.size() <= 1) {
    const auto targets = exitwave_targets(obj, model, batch, sqrt_meas);
    return grad_fp_exitwave_frozen(obj, model, batch, targets, norm);
  }
  const std::size_t side = obj.side();
  ChannelGradient total{RealGrid(side), RealGrid(side), 0.0};
  parallel_fold<ChannelGradient>(
      batch.size(), exec,
      [&](std::size_t j) {
        const std::span<const std::size_t> one = batch.subspan(j, 1);
        const auto targets = exitwave_targets(obj, model, one, sqrt_meas);
        return grad_fp_exitwave_frozen(obj, model, one, targets, norm);
      },
      [&](ChannelGradient&& g) {
        total.loss += g.loss;
        for (std::size_t i = 0; i < total.d_real.size(); ++i) {
          total.d_real[i] += g.d_real[i];
          total.d_imag[i] += g.d_imag[i];
        }
      });
  return total;
}

RealGradient grad_spi(const RealGrid& object, std::span<const RealGrid> patterns,
                      std::span<const double> meas, std::span<const std::size_t> batch,
                      LossNorm norm) {
  require_batch(batch, patterns.size(), "grad_spi");
  require(meas.size() == patterns.size(), ErrorCode::Dimension,
          "grad_spi: measurement count does not match pattern count");
  RealGradient out{RealGrid(object.side()), 0.0};
  for (std::size_t n : batch) {
    const double residual = meas[n] - spi_forward(object, patterns[n]);
    out.loss += residual_loss(residual, norm);
    const double g = prediction_sensitivity(residual, norm);
    if (g == 0.0) continue;
    for (std::size_t i = 0; i < out.grad.size(); ++i) out.grad[i] += g * patterns[n][i];
  }
  return out;
}

RealGradient grad_sim(const SimScene& scene, std::span<const std::size_t> batch,
                      std::span<const RealImage> meas, LossNorm norm, const Execution& exec) {
  require_batch(batch, scene.patterns.size(), "grad_sim");
  require(meas.size() == scene.patterns.size(), ErrorCode::Dimension,
          "grad_sim: measurement count does not match pattern count");
  const std::size_t side = scene.object.side();
  const RealGrid psf_flipped = flip(scene.psf_inc);
  RealGradient out{RealGrid(side), 0.0};
  parallel_fold<RealGradient>(
      batch.size(), exec,
      [&](std::size_t j) {
        const std::size_t n = batch[j];
        require_same_side(meas[n].side(), side, "grad_sim measurement");
        const RealImage pred = sim_forward(scene, n);
        RealGradient c{RealGrid(side), 0.0};
        RealGrid g(side);
        for (std::size_t i = 0; i < g.size(); ++i) {
          const double residual = meas[n].data[i] - pred.data[i];
          c.loss += residual_loss(residual, norm);
          g[i] = prediction_sensitivity(residual, norm);
        }
        const RealGrid back = circular_convolve(g, psf_flipped);
        for (std::size_t i = 0; i < g.size(); ++i) c.grad[i] = scene.patterns[n][i] * back[i];
        return c;
      },
      [&](RealGradient&& c) {
        out.loss += c.loss;
        for (std::size_t i = 0; i < out.grad.size(); ++i) out.grad[i] += c.grad[i];
      });
  return out;
}

}  // namespace fpnet
