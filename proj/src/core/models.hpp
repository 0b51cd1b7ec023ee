#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "field.hpp"
#include "grid.hpp"
#include "optics.hpp"

namespace fpnet {

// Two-channel spatial object O = o_r + i o_i.
struct FpObject {
  RealGrid o_r;
  RealGrid o_i;

  std::size_t side() const noexcept { return o_r.side(); }
  ComplexGrid complex() const;
  static FpObject from_complex(const ComplexGrid& field);
};

// Two-channel centered object spectrum.
struct FpSpectrumObject {
  RealGrid spec_r;
  RealGrid spec_i;

  std::size_t side() const noexcept { return spec_r.side(); }
  ComplexGrid complex() const;
  static FpSpectrumObject from_complex(const ComplexGrid& spectrum);
};

struct SimScene {
  RealGrid object;
  std::vector<RealGrid> patterns;
  RealGrid psf_inc;

  void validate() const;
};

// Intensity (convolution) model. Keeps the aperture as a list of passing
// bin offsets so per-illumination products skip the zero region.
class FpIntensityModel {
 public:
  explicit FpIntensityModel(OpticsConfig cfg);

  const OpticsConfig& optics() const noexcept { return cfg_; }
  std::size_t count() const noexcept { return shifts_.size(); }

  // Unitary spectrum of a spatial object in FFT-native (uncentered) order.
  ComplexGrid native_spectrum(const ComplexGrid& object) const;
  // psi_n = O (*) PSF_n from a native object spectrum.
  ComplexGrid exit_field(const ComplexGrid& native_spec, std::size_t n) const;
  // Adds conj(CTF_n) * U(w) into the native accumulator `acc`.
  void accumulate_adjoint(const ComplexGrid& w, std::size_t n, ComplexGrid& acc) const;
  // N * U^{-1}(acc): maps the accumulator back to dL/dO*.
  ComplexGrid finish_adjoint(ComplexGrid acc) const;

  // psi_n sampled on the sensor lattice (every stride-th pixel).
  ComplexGrid lattice_field(const ComplexGrid& native_spec, std::size_t n) const;
  // accumulate_adjoint for w = zero_upsample(w_lattice, stride).
  void accumulate_lattice_adjoint(const ComplexGrid& w_lattice, std::size_t n,
                                  ComplexGrid& acc) const;

  RealGrid predict(const ComplexGrid& native_spec, std::size_t n) const;

 private:
  std::size_t native_index(int fy, int fx) const;
  std::size_t lattice_index(int fy, int fx) const;

  OpticsConfig cfg_;
  std::vector<std::pair<int, int>> aperture_;  // (dy, dx) offsets with CTF = 1
  std::vector<BinShift> shifts_;
  // Aperture bins stay distinct modulo the lattice side, so lattice samples
  // come from an m x m transform of the folded spectrum.
  bool fold_ = false;
};

// Exit-wave (multiplication) model on the low-resolution grid.
class FpExitwaveModel {
 public:
  explicit FpExitwaveModel(OpticsConfig cfg);

  const OpticsConfig& optics() const noexcept { return cfg_; }
  std::size_t count() const noexcept { return shifts_.size(); }
  const Spectrum& ctf0() const noexcept { return ctf0_; }
  BinShift shift(std::size_t n) const { return shifts_.at(n); }

  // phi_hat_n = crop(O_hat, shift_n, M) * CTF0.
  Spectrum exit_spectrum(const Spectrum& object_spectrum, std::size_t n) const;
  // psi_n = idft2(phi_hat_n).
  ComplexField exit_wave(const Spectrum& object_spectrum, std::size_t n) const;

 private:
  OpticsConfig cfg_;
  Spectrum ctf0_;
  std::vector<BinShift> shifts_;
};

RealImage fp_intensity_forward(const FpObject& obj, const OpticsConfig& cfg, std::size_t n);
// Same quantity through the two-channel real convolutions
// (PSF_r*O_r - PSF_i*O_i)^2 + (PSF_i*O_r + PSF_r*O_i)^2.
RealImage fp_intensity_forward_channels(const FpObject& obj, const OpticsConfig& cfg,
                                        std::size_t n);

ComplexField fp_exitwave_forward(const FpSpectrumObject& obj, const OpticsConfig& cfg,
                                 std::size_t n);

inline constexpr double kPhaseEpsilon = 1e-12;

// Fourier-magnitude projection: dft2(sqrt_meas * psi / |psi|), with unit
// phase where |psi| < kPhaseEpsilon.
Spectrum fmp_project(const ComplexField& psi, const RealImage& sqrt_meas);

double spi_forward(const RealGrid& object, const RealGrid& pattern);

RealImage sim_forward(const SimScene& scene, std::size_t n);

}  // namespace fpnet
