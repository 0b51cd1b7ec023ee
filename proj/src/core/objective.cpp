#include "objective.hpp"

#include <cmath>

namespace fpnet {
namespace {

RealGrid plane(std::span<const double> params, std::size_t side, std::size_t index) {
  const std::size_t count = side * side;
  return RealGrid(side, std::vector<double>(params.begin() + static_cast<long>(index * count),
                                            params.begin() + static_cast<long>((index + 1) * count)));
}

void write_planes(const ChannelGradient& g, std::span<double> out) {
  const std::size_t count = g.d_real.size();
  std::copy(g.d_real.values().begin(), g.d_real.values().end(), out.begin());
  std::copy(g.d_imag.values().begin(), g.d_imag.values().end(),
            out.begin() + static_cast<long>(count));
}

std::vector<double> pack_complex(const ComplexGrid& z) {
  std::vector<double> out(2 * z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    out[i] = z[i].real();
    out[z.size() + i] = z[i].imag();
  }
  return out;
}

ComplexGrid unpack_complex(std::span<const double> params, std::size_t side) {
  const std::size_t count = side * side;
  ComplexGrid z(side);
  for (std::size_t i = 0; i < count; ++i) z[i] = {params[i], params[count + i]};
  return z;
}

void require_params(std::span<const double> params, std::size_t expected) {
  require(params.size() == expected, ErrorCode::Dimension,
          "objective: expected " + std::to_string(expected) + " parameters, got " +
              std::to_string(params.size()));
}

}  // namespace

double Objective::loss(std::span<const double> params, const Batch& batch) const {
  std::vector<double> scratch(parameter_count());
  return gradient(params, batch, scratch, {});
}

// --- intensity --------------------------------------------------------------

FpIntensityObjective::FpIntensityObjective(const OpticsConfig& cfg, std::vector<RealImage> meas,
                                           LossNorm norm)
    : model_(cfg), meas_(std::move(meas)), norm_(norm) {
  require(meas_.size() == model_.count(), ErrorCode::Dimension,
          "intensity objective: measurement count does not match illumination count");
}

double FpIntensityObjective::gradient(std::span<const double> params, const Batch& batch,
                                      std::span<double> grad, const Execution& exec) const {
  require_params(params, parameter_count());
  const FpObject obj{plane(params, side(), 0), plane(params, side(), 1)};
  const ChannelGradient g = grad_fp_intensity(obj, model_, batch, meas_, norm_, exec);
  write_planes(g, grad);
  return g.loss;
}

std::vector<std::int8_t> FpIntensityObjective::kink_signature(std::span<const double> params,
                                                              const Batch& batch) const {
  if (norm_ == LossNorm::L2) return {};
  const ComplexGrid spec = model_.native_spectrum(unpack_complex(params, side()));
  std::vector<std::int8_t> out;
  for (std::size_t n : batch) {
    const RealGrid pred = model_.predict(spec, n);
    for (std::size_t i = 0; i < pred.size(); ++i)
      out.push_back(static_cast<std::int8_t>(sign0(meas_[n].data[i] - pred[i])));
  }
  return out;
}

ComplexGrid FpIntensityObjective::to_object(std::span<const double> params) const {
  return unpack_complex(params, side());
}

std::vector<double> FpIntensityObjective::from_object(const ComplexGrid& object) const {
  require_same_side(object.side(), side(), "intensity objective object");
  return pack_complex(object);
}

// --- exit wave --------------------------------------------------------------

FpExitwaveObjective::FpExitwaveObjective(const OpticsConfig& cfg,
                                         std::vector<RealImage> intensities, LossNorm norm)
    : model_(cfg), norm_(norm) {
  require(intensities.size() == model_.count(), ErrorCode::Dimension,
          "exit-wave objective: measurement count does not match illumination count");
  for (auto& img : intensities) {
    require_same_side(img.side(), cfg.m_side(), "exit-wave objective measurement");
    for (auto& v : img.data.values()) {
      require(v >= 0.0, ErrorCode::Domain, "exit-wave objective: negative intensity");
      v = std::sqrt(v);
    }
    sqrt_meas_.push_back(std::move(img));
  }
}

void FpExitwaveObjective::freeze(std::span<const double> params, const Batch& batch) {
  require_params(params, parameter_count());
  const FpSpectrumObject obj{plane(params, side(), 0), plane(params, side(), 1)};
  frozen_ = exitwave_targets(obj, model_, batch, sqrt_meas_);
}

double FpExitwaveObjective::gradient(std::span<const double> params, const Batch& batch,
                                     std::span<double> grad, const Execution& exec) const {
  require_params(params, parameter_count());
  const FpSpectrumObject obj{plane(params, side(), 0), plane(params, side(), 1)};
  ChannelGradient g;
  if (!frozen_.empty()) {
    g = grad_fp_exitwave_frozen(obj, model_, batch, frozen_, norm_);
  } else {
    g = grad_fp_exitwave(obj, model_, batch, sqrt_meas_, norm_, exec);
  }
  write_planes(g, grad);
  return g.loss;
}

std::vector<std::int8_t> FpExitwaveObjective::kink_signature(std::span<const double> params,
                                                             const Batch& batch) const {
  if (norm_ == LossNorm::L2) return {};
  const FpSpectrumObject obj{plane(params, side(), 0), plane(params, side(), 1)};
  const Spectrum spectrum{obj.complex(), model_.optics().dk(), true};
  const std::vector<Spectrum> targets =
      frozen_.empty() ? exitwave_targets(obj, model_, batch, sqrt_meas_) : frozen_;
  std::vector<std::int8_t> out;
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const Spectrum phi = model_.exit_spectrum(spectrum, batch[j]);
    for (std::size_t i = 0; i < phi.data.size(); ++i) {
      const double mag = std::abs(phi.data[i] - targets[j].data[i]);
      // |r| is smooth away from r = 0; flag near-zero residuals as kinks.
      out.push_back(static_cast<std::int8_t>(mag > 1e-9 ? 1 : 0));
    }
  }
  return out;
}

ComplexGrid FpExitwaveObjective::to_object(std::span<const double> params) const {
  const Spectrum spectrum{unpack_complex(params, side()), model_.optics().dk(), true};
  return idft2(spectrum).data;
}

std::vector<double> FpExitwaveObjective::from_object(const ComplexGrid& object) const {
  require_same_side(object.side(), side(), "exit-wave objective object");
  return pack_complex(dft2({object, model_.optics().px_high}).data);
}

// --- single pixel -----------------------------------------------------------

SpiObjective::SpiObjective(std::vector<RealGrid> patterns, std::vector<double> meas,
                           LossNorm norm)
    : patterns_(std::move(patterns)), meas_(std::move(meas)), norm_(norm) {
  require(!patterns_.empty(), ErrorCode::Dimension, "spi objective: no patterns");
  require(patterns_.size() == meas_.size(), ErrorCode::Dimension,
          "spi objective: one measurement per pattern required");
  for (const auto& p : patterns_) require_same_side(p.side(), side(), "spi pattern");
}

double SpiObjective::gradient(std::span<const double> params, const Batch& batch,
                              std::span<double> grad, const Execution&) const {
  require_params(params, parameter_count());
  const RealGradient g = grad_spi(plane(params, side(), 0), patterns_, meas_, batch, norm_);
  std::copy(g.grad.values().begin(), g.grad.values().end(), grad.begin());
  return g.loss;
}

std::vector<std::int8_t> SpiObjective::kink_signature(std::span<const double> params,
                                                      const Batch& batch) const {
  if (norm_ == LossNorm::L2) return {};
  const RealGrid obj = plane(params, side(), 0);
  std::vector<std::int8_t> out;
  for (std::size_t n : batch)
    out.push_back(static_cast<std::int8_t>(sign0(meas_[n] - spi_forward(obj, patterns_[n]))));
  return out;
}

ComplexGrid SpiObjective::to_object(std::span<const double> params) const {
  ComplexGrid z(side());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = params[i];
  return z;
}

std::vector<double> SpiObjective::from_object(const ComplexGrid& object) const {
  require_same_side(object.side(), side(), "spi objective object");
  std::vector<double> out(object.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = object[i].real();
  return out;
}

// --- structured illumination --------------------------------------------------

SimObjective::SimObjective(RealGrid psf_inc, std::vector<RealGrid> patterns,
                           std::vector<RealImage> meas, LossNorm norm)
    : psf_(std::move(psf_inc)), patterns_(std::move(patterns)), meas_(std::move(meas)),
      norm_(norm) {
  require(!patterns_.empty() && patterns_.size() == meas_.size(), ErrorCode::Dimension,
          "sim objective: one measurement per pattern required");
  for (const auto& p : patterns_) require_same_side(p.side(), side(), "sim pattern");
  for (const auto& m : meas_) require_same_side(m.side(), side(), "sim measurement");
}

SimScene SimObjective::scene_for(std::span<const double> params) const {
  return {plane(params, side(), 0), patterns_, psf_};
}

double SimObjective::gradient(std::span<const double> params, const Batch& batch,
                              std::span<double> grad, const Execution& exec) const {
  require_params(params, parameter_count());
  const RealGradient g = grad_sim(scene_for(params), batch, meas_, norm_, exec);
  std::copy(g.grad.values().begin(), g.grad.values().end(), grad.begin());
  return g.loss;
}

std::vector<std::int8_t> SimObjective::kink_signature(std::span<const double> params,
                                                      const Batch& batch) const {
  if (norm_ == LossNorm::L2) return {};
  const SimScene scene = scene_for(params);
  std::vector<std::int8_t> out;
  for (std::size_t n : batch) {
    const RealImage pred = sim_forward(scene, n);
    for (std::size_t i = 0; i < pred.data.size(); ++i)
      out.push_back(static_cast<std::int8_t>(sign0(meas_[n].data[i] - pred.data[i])));
  }
  return out;
}

ComplexGrid SimObjective::to_object(std::span<const double> params) const {
  ComplexGrid z(side());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = params[i];
  return z;
}

std::vector<double> SimObjective::from_object(const ComplexGrid& object) const {
  require_same_side(object.side(), side(), "sim objective object");
  std::vector<double> out(object.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = object[i].real();
  return out;
}

std::unique_ptr<Objective> make_objective(const Dataset& dataset, LossSpec loss) {
  switch (loss.target) {
    case LossTarget::Intensity:
    case LossTarget::ExitWave:
      require(dataset.kind == DatasetKind::Fp, ErrorCode::Config,
              "model '" + to_string(loss.target) + "' needs a Fourier ptychography dataset, got '" +
                  to_string(dataset.kind) + "'");
      if (loss.target == LossTarget::Intensity)
        return std::make_unique<FpIntensityObjective>(dataset.cfg, dataset.measurements,
                                                      loss.norm);
      return std::make_unique<FpExitwaveObjective>(dataset.cfg, dataset.measurements, loss.norm);
    case LossTarget::SinglePixel:
      require(dataset.kind == DatasetKind::Spi, ErrorCode::Config,
              "model 'spi' needs a single-pixel dataset, got '" + to_string(dataset.kind) + "'");
      return std::make_unique<SpiObjective>(dataset.patterns, dataset.scalars, loss.norm);
    case LossTarget::Sim:
      require(dataset.kind == DatasetKind::Sim, ErrorCode::Config,
              "model 'sim' needs a structured-illumination dataset, got '" +
                  to_string(dataset.kind) + "'");
      return std::make_unique<SimObjective>(dataset.psf_inc, dataset.patterns,
                                            dataset.measurements, loss.norm);
  }
  fail(ErrorCode::Config, "unknown model");
}

}  // namespace fpnet
