#include "models.hpp"

#include <cmath>

#include "fft.hpp"

namespace fpnet {

ComplexGrid FpObject::complex() const {
  require_same_side(o_r.side(), o_i.side(), "FpObject");
  ComplexGrid out(o_r.side());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {o_r[i], o_i[i]};
  return out;
}

FpObject FpObject::from_complex(const ComplexGrid& field) {
  FpObject obj{RealGrid(field.side()), RealGrid(field.side())};
  for (std::size_t i = 0; i < field.size(); ++i) {
    obj.o_r[i] = field[i].real();
    obj.o_i[i] = field[i].imag();
  }
  return obj;
}

ComplexGrid FpSpectrumObject::complex() const {
  require_same_side(spec_r.side(), spec_i.side(), "FpSpectrumObject");
  ComplexGrid out(spec_r.side());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = {spec_r[i], spec_i[i]};
  return out;
}

FpSpectrumObject FpSpectrumObject::from_complex(const ComplexGrid& spectrum) {
  FpSpectrumObject obj{RealGrid(spectrum.side()), RealGrid(spectrum.side())};
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    obj.spec_r[i] = spectrum[i].real();
    obj.spec_i[i] = spectrum[i].imag();
  }
  return obj;
}

void SimScene::validate() const {
  require(object.side() >= 2, ErrorCode::Dimension, "sim scene: object side must be >= 2");
  require_same_side(object.side(), psf_inc.side(), "sim scene psf");
  for (double v : object.values())
    require(v >= 0.0 && std::isfinite(v), ErrorCode::Domain, "sim scene: object must be >= 0");
  for (const auto& p : patterns) {
    require_same_side(object.side(), p.side(), "sim scene pattern");
    for (double v : p.values())
      require(v >= 0.0 && std::isfinite(v), ErrorCode::Domain, "sim scene: pattern must be >= 0");
  }
  double total = 0.0;
  for (double v : psf_inc.values()) {
    require(v >= 0.0, ErrorCode::Domain, "sim scene: psf must be >= 0");
    total += v;
  }
  require(std::abs(total - 1.0) <= 1e-12, ErrorCode::Domain, "sim scene: psf must sum to 1");
}

// ---------------------------------------------------------------------------

FpIntensityModel::FpIntensityModel(OpticsConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  const Spectrum ctf = make_ctf(cfg_);
  const int c = static_cast<int>(cfg_.n_high / 2);
  for (std::size_t r = 0; r < ctf.side(); ++r)
    for (std::size_t col = 0; col < ctf.side(); ++col)
      if (ctf.data(r, col) != cplx{})
        aperture_.emplace_back(static_cast<int>(r) - c, static_cast<int>(col) - c);
  const int side = static_cast<int>(cfg_.n_high);
  for (std::size_t n = 0; n < cfg_.wavevectors.size(); ++n) {
    const BinShift s = cfg_.shift(n);
    for (const auto& [dy, dx] : aperture_) {
      const int rr = c + dy + s.y;
      const int cc = c + dx + s.x;
      if (rr < 0 || rr >= side || cc < 0 || cc >= side)
        fail(ErrorCode::OutOfBand, "intensity model: illumination " + std::to_string(n) +
                                       " shifts the aperture outside the representable band");
    }
    shifts_.push_back(s);
  }
  std::vector<bool> seen(cfg_.m_side() * cfg_.m_side(), false);
  fold_ = true;
  for (const auto& [dy, dx] : aperture_) {
    const std::size_t idx = lattice_index(dy, dx);
    if (seen[idx]) fold_ = false;
    seen[idx] = true;
  }
}

std::size_t FpIntensityModel::lattice_index(int fy, int fx) const {
  const int m = static_cast<int>(cfg_.m_side());
  const int r = ((fy % m) + m) % m;
  const int c = ((fx % m) + m) % m;
  return static_cast<std::size_t>(r) * cfg_.m_side() + static_cast<std::size_t>(c);
}

std::size_t FpIntensityModel::native_index(int fy, int fx) const {
  const int n = static_cast<int>(cfg_.n_high);
  const int r = ((fy % n) + n) % n;
  const int c = ((fx % n) + n) % n;
  return static_cast<std::size_t>(r) * cfg_.n_high + static_cast<std::size_t>(c);
}

ComplexGrid FpIntensityModel::native_spectrum(const ComplexGrid& object) const {
  require_same_side(object.side(), cfg_.n_high, "intensity model object");
  ComplexGrid spec = object;
  fft::transform_inplace(spec.values(), spec.side(), fft::Direction::Forward);
  const double scale = 1.0 / static_cast<double>(spec.side());
  for (auto& v : spec.values()) v *= scale;
  return spec;
}

ComplexGrid FpIntensityModel::exit_field(const ComplexGrid& native_spec, std::size_t n) const {
  const BinShift s = shifts_.at(n);
  ComplexGrid field(cfg_.n_high);
  for (const auto& [dy, dx] : aperture_) {
    const std::size_t idx = native_index(dy + s.y, dx + s.x);
    field[idx] = native_spec[idx];
  }
  // Unnormalized inverse equals N * U^{-1}, i.e. O (*) PSF_n.
  fft::transform_inplace(field.values(), field.side(), fft::Direction::Inverse);
  return field;
}

void FpIntensityModel::accumulate_adjoint(const ComplexGrid& w, std::size_t n,
                                          ComplexGrid& acc) const {
  const BinShift s = shifts_.at(n);
  ComplexGrid spec = w;
  fft::transform_inplace(spec.values(), spec.side(), fft::Direction::Forward);
  const double scale = 1.0 / static_cast<double>(spec.side());
  for (const auto& [dy, dx] : aperture_) {
    const std::size_t idx = native_index(dy + s.y, dx + s.x);
    acc[idx] += spec[idx] * scale;
  }
}

ComplexGrid FpIntensityModel::finish_adjoint(ComplexGrid acc) const {
  fft::transform_inplace(acc.values(), acc.side(), fft::Direction::Inverse);
  return acc;
}

ComplexGrid FpIntensityModel::lattice_field(const ComplexGrid& native_spec, std::size_t n) const {
  if (!fold_) return decimate(exit_field(native_spec, n), cfg_.stride);
  const BinShift s = shifts_.at(n);
  ComplexGrid field(cfg_.m_side());
  for (const auto& [dy, dx] : aperture_)
    field[lattice_index(dy + s.y, dx + s.x)] = native_spec[native_index(dy + s.y, dx + s.x)];
  fft::transform_inplace(field.values(), field.side(), fft::Direction::Inverse);
  return field;
}

void FpIntensityModel::accumulate_lattice_adjoint(const ComplexGrid& w_lattice, std::size_t n,
                                                  ComplexGrid& acc) const {
  if (!fold_) {
    accumulate_adjoint(zero_upsample(w_lattice, cfg_.stride), n, acc);
    return;
  }
  const BinShift s = shifts_.at(n);
  ComplexGrid spec = w_lattice;
  fft::transform_inplace(spec.values(), spec.side(), fft::Direction::Forward);
  const double scale = 1.0 / static_cast<double>(cfg_.n_high);
  for (const auto& [dy, dx] : aperture_)
    acc[native_index(dy + s.y, dx + s.x)] += spec[lattice_index(dy + s.y, dx + s.x)] * scale;
}

RealGrid FpIntensityModel::predict(const ComplexGrid& native_spec, std::size_t n) const {
  const ComplexGrid psi = lattice_field(native_spec, n);
  RealGrid out(psi.side());
  for (std::size_t i = 0; i < psi.size(); ++i) out[i] = std::norm(psi[i]);
  return out;
}

// ---------------------------------------------------------------------------

FpExitwaveModel::FpExitwaveModel(OpticsConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  const std::size_t m = cfg_.m_side();
  ctf0_ = disk_spectrum(m, cfg_.dk(), cfg_.na / cfg_.lambda_um);
  // The aperture must sit strictly inside the crop window.
  const double radius = cfg_.ctf_radius_bins();
  require(radius < static_cast<double>(m / 2), ErrorCode::OutOfBand,
          "exit-wave model: aperture radius " + std::to_string(radius) +
              " bins does not fit the " + std::to_string(m) + "-bin crop window");
  const Spectrum probe{ComplexGrid(cfg_.n_high), cfg_.dk(), true};
  for (std::size_t n = 0; n < cfg_.wavevectors.size(); ++n) {
    const BinShift s = cfg_.shift(n);
    (void)crop_subspectrum(probe, s, m);  // throws OutOfBand for a bad window
    shifts_.push_back(s);
  }
}

Spectrum FpExitwaveModel::exit_spectrum(const Spectrum& object_spectrum, std::size_t n) const {
  require_same_side(object_spectrum.side(), cfg_.n_high, "exit-wave model spectrum");
  Spectrum phi = crop_subspectrum(object_spectrum, shifts_.at(n), cfg_.m_side());
  for (std::size_t i = 0; i < phi.data.size(); ++i) phi.data[i] *= ctf0_.data[i];
  return phi;
}

ComplexField FpExitwaveModel::exit_wave(const Spectrum& object_spectrum, std::size_t n) const {
  return idft2(exit_spectrum(object_spectrum, n));
}

// ---------------------------------------------------------------------------

RealImage fp_intensity_forward(const FpObject& obj, const OpticsConfig& cfg, std::size_t n) {
  require_same_side(obj.side(), cfg.n_high, "fp_intensity_forward");
  const FpIntensityModel model(cfg);
  require(n < model.count(), ErrorCode::InvalidArgument, "illumination index out of range");
  return {model.predict(model.native_spectrum(obj.complex()), n),
          cfg.px_high * static_cast<double>(cfg.stride)};
}

RealImage fp_intensity_forward_channels(const FpObject& obj, const OpticsConfig& cfg,
                                        std::size_t n) {
  require_same_side(obj.side(), cfg.n_high, "fp_intensity_forward_channels");
  cfg.validate();
  const ComplexField psf = make_psf_n(cfg, n);
  RealGrid psf_r(psf.side());
  RealGrid psf_i(psf.side());
  for (std::size_t i = 0; i < psf_r.size(); ++i) {
    psf_r[i] = psf.data[i].real();
    psf_i[i] = psf.data[i].imag();
  }
  const RealGrid rr = circular_convolve(psf_r, obj.o_r);
  const RealGrid ii = circular_convolve(psf_i, obj.o_i);
  const RealGrid ir = circular_convolve(psf_i, obj.o_r);
  const RealGrid ri = circular_convolve(psf_r, obj.o_i);
  RealGrid intensity(obj.side());
  for (std::size_t i = 0; i < intensity.size(); ++i) {
    const double a = rr[i] - ii[i];
    const double b = ir[i] + ri[i];
    intensity[i] = a * a + b * b;
  }
  return {decimate(intensity, cfg.stride), cfg.px_high * static_cast<double>(cfg.stride)};
}

ComplexField fp_exitwave_forward(const FpSpectrumObject& obj, const OpticsConfig& cfg,
                                 std::size_t n) {
  const FpExitwaveModel model(cfg);
  require(n < model.count(), ErrorCode::InvalidArgument, "illumination index out of range");
  return model.exit_wave({obj.complex(), cfg.dk(), true}, n);
}

Spectrum fmp_project(const ComplexField& psi, const RealImage& sqrt_meas) {
  require_same_side(psi.side(), sqrt_meas.side(), "fmp_project");
  ComplexField projected{ComplexGrid(psi.side()), psi.px};
  for (std::size_t i = 0; i < projected.data.size(); ++i) {
    const double amp = sqrt_meas.data[i];
    require(amp >= 0.0, ErrorCode::Domain, "fmp_project: negative measured amplitude");
    const double mag = std::abs(psi.data[i]);
    const cplx phase = mag < kPhaseEpsilon ? cplx{1.0, 0.0} : psi.data[i] / mag;
    projected.data[i] = amp * phase;
  }
  return dft2(projected);
}

double spi_forward(const RealGrid& object, const RealGrid& pattern) {
  require_same_side(object.side(), pattern.side(), "spi_forward");
  return inner(object, pattern);
}

RealImage sim_forward(const SimScene& scene, std::size_t n) {
  require(n < scene.patterns.size(), ErrorCode::InvalidArgument,
          "sim_forward: pattern index " + std::to_string(n) + " out of range");
  RealGrid lit(scene.object.side());
  for (std::size_t i = 0; i < lit.size(); ++i) lit[i] = scene.object[i] * scene.patterns[n][i];
  return {circular_convolve(lit, scene.psf_inc), 1.0};
}

}  // namespace fpnet
