#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "models.hpp"
#include "parallel.hpp"

namespace fpnet {

enum class LossNorm { L1, L2 };
enum class LossTarget { Intensity, ExitWave, SinglePixel, Sim };

struct LossSpec {
  LossNorm norm = LossNorm::L1;
  LossTarget target = LossTarget::Intensity;
};

std::string to_string(LossNorm norm);
std::string to_string(LossTarget target);
LossNorm parse_loss_norm(const std::string& text);
LossTarget parse_loss_target(const std::string& text);

// sign with sign(0) = 0.
inline double sign0(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Pointwise loss of residual r = measured - predicted and its derivative
// with respect to the prediction.
inline double residual_loss(double r, LossNorm norm) {
  return norm == LossNorm::L1 ? std::abs(r) : r * r;
}
inline double prediction_sensitivity(double r, LossNorm norm) {
  return norm == LossNorm::L1 ? -sign0(r) : -2.0 * r;
}

double loss_intensity(std::span<const RealImage> meas, std::span<const RealImage> pred,
                      LossNorm norm);
double loss_exitwave(std::span<const Spectrum> phi_update, std::span<const Spectrum> phi_hat,
                     LossNorm norm);

// Gradient with respect to the two real channels of a complex parameter.
// Channel gradients are 2 Re / 2 Im of the Wirtinger derivative dL/dz*.
struct ChannelGradient {
  RealGrid d_real;
  RealGrid d_imag;
  double loss = 0.0;
};

struct RealGradient {
  RealGrid grad;
  double loss = 0.0;
};

// `meas` is indexed by illumination; `batch` selects which terms enter.
ChannelGradient grad_fp_intensity(const FpObject& obj, const FpIntensityModel& model,
                                  std::span<const std::size_t> batch,
                                  std::span<const RealImage> meas, LossNorm norm,
                                  const Execution& exec = {});

// FMP targets phi_update_n for each batch entry, computed at `obj`.
std::vector<Spectrum> exitwave_targets(const FpSpectrumObject& obj,
                                       const FpExitwaveModel& model,
                                       std::span<const std::size_t> batch,
                                       std::span<const RealImage> sqrt_meas);

// Gradient with the projection output held fixed (no derivative flows
// through the FMP step).
ChannelGradient grad_fp_exitwave_frozen(const FpSpectrumObject& obj,
                                        const FpExitwaveModel& model,
                                        std::span<const std::size_t> batch,
                                        std::span<const Spectrum> targets, LossNorm norm);

ChannelGradient grad_fp_exitwave(const FpSpectrumObject& obj, const FpExitwaveModel& model,
                                 std::span<const std::size_t> batch,
                                 std::span<const RealImage> sqrt_meas, LossNorm norm,
                                 const Execution& exec = {});

RealGradient grad_spi(const RealGrid& object, std::span<const RealGrid> patterns,
                      std::span<const double> meas, std::span<const std::size_t> batch,
                      LossNorm norm);

RealGradient grad_sim(const SimScene& scene, std::span<const std::size_t> batch,
                      std::span<const RealImage> meas, LossNorm norm,
                      const Execution& exec = {});

}  // namespace fpnet
