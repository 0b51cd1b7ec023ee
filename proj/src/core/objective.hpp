#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "grad.hpp"
#include "optim.hpp"
#include "simdata.hpp"

namespace fpnet {

// A measurement-mismatch loss over a flat parameter vector. Each model packs
// its learnable arrays channel by channel (real plane, then imaginary plane).
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::size_t measurement_count() const = 0;
  virtual std::size_t parameter_count() const = 0;
  virtual std::size_t side() const = 0;

  // Loss over `batch`; writes the analytic gradient into `grad`.
  virtual double gradient(std::span<const double> params, const Batch& batch,
                          std::span<double> grad, const Execution& exec) const = 0;
  virtual double loss(std::span<const double> params, const Batch& batch) const;

  // Signs of the L1 residuals entering the loss (empty for smooth losses).
  virtual std::vector<std::int8_t> kink_signature(std::span<const double> params,
                                                  const Batch& batch) const = 0;

  // Parameters as a spatial-domain complex image.
  virtual ComplexGrid to_object(std::span<const double> params) const = 0;
  virtual std::vector<double> from_object(const ComplexGrid& object) const = 0;
};

class FpIntensityObjective final : public Objective {
 public:
  FpIntensityObjective(const OpticsConfig& cfg, std::vector<RealImage> meas, LossNorm norm);

  std::size_t measurement_count() const override { return meas_.size(); }
  std::size_t parameter_count() const override { return 2 * side() * side(); }
  std::size_t side() const override { return model_.optics().n_high; }
  double gradient(std::span<const double> params, const Batch& batch, std::span<double> grad,
                  const Execution& exec) const override;
  std::vector<std::int8_t> kink_signature(std::span<const double> params,
                                          const Batch& batch) const override;
  ComplexGrid to_object(std::span<const double> params) const override;
  std::vector<double> from_object(const ComplexGrid& object) const override;

  const FpIntensityModel& model() const noexcept { return model_; }

 private:
  FpIntensityModel model_;
  std::vector<RealImage> meas_;
  LossNorm norm_;
};

// Parameters are the centered object spectrum. With `frozen` targets the
// FMP output is held constant (used by the finite-difference oracle).
class FpExitwaveObjective final : public Objective {
 public:
  FpExitwaveObjective(const OpticsConfig& cfg, std::vector<RealImage> intensities,
                      LossNorm norm);

  std::size_t measurement_count() const override { return sqrt_meas_.size(); }
  std::size_t parameter_count() const override { return 2 * side() * side(); }
  std::size_t side() const override { return model_.optics().n_high; }
  double gradient(std::span<const double> params, const Batch& batch, std::span<double> grad,
                  const Execution& exec) const override;
  std::vector<std::int8_t> kink_signature(std::span<const double> params,
                                          const Batch& batch) const override;
  ComplexGrid to_object(std::span<const double> params) const override;
  std::vector<double> from_object(const ComplexGrid& object) const override;

  // Freezes phi_update at `params` for `batch`.
  void freeze(std::span<const double> params, const Batch& batch);
  void unfreeze() { frozen_.clear(); }

  const FpExitwaveModel& model() const noexcept { return model_; }
  std::span<const RealImage> sqrt_meas() const noexcept { return sqrt_meas_; }

 private:
  FpExitwaveModel model_;
  std::vector<RealImage> sqrt_meas_;
  LossNorm norm_;
  std::vector<Spectrum> frozen_;
};

class SpiObjective final : public Objective {
 public:
  SpiObjective(std::vector<RealGrid> patterns, std::vector<double> meas, LossNorm norm);

  std::size_t measurement_count() const override { return meas_.size(); }
  std::size_t parameter_count() const override { return side() * side(); }
  std::size_t side() const override { return patterns_.front().side(); }
  double gradient(std::span<const double> params, const Batch& batch, std::span<double> grad,
                  const Execution& exec) const override;
  std::vector<std::int8_t> kink_signature(std::span<const double> params,
                                          const Batch& batch) const override;
  ComplexGrid to_object(std::span<const double> params) const override;
  std::vector<double> from_object(const ComplexGrid& object) const override;

 private:
  std::vector<RealGrid> patterns_;
  std::vector<double> meas_;
  LossNorm norm_;
};

class SimObjective final : public Objective {
 public:
  SimObjective(RealGrid psf_inc, std::vector<RealGrid> patterns, std::vector<RealImage> meas,
               LossNorm norm);

  std::size_t measurement_count() const override { return meas_.size(); }
  std::size_t parameter_count() const override { return side() * side(); }
  std::size_t side() const override { return psf_.side(); }
  double gradient(std::span<const double> params, const Batch& batch, std::span<double> grad,
                  const Execution& exec) const override;
  std::vector<std::int8_t> kink_signature(std::span<const double> params,
                                          const Batch& batch) const override;
  ComplexGrid to_object(std::span<const double> params) const override;
  std::vector<double> from_object(const ComplexGrid& object) const override;

 private:
  SimScene scene_for(std::span<const double> params) const;

  RealGrid psf_;
  std::vector<RealGrid> patterns_;
  std::vector<RealImage> meas_;
  LossNorm norm_;
};

// Builds the objective matching `target` for a dataset. Throws Config when
// the dataset kind cannot feed the model.
std::unique_ptr<Objective> make_objective(const Dataset& dataset, LossSpec loss);

}  // namespace fpnet
