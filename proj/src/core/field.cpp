#include "field.hpp"

#include <cmath>
#include <numeric>

#include "fft.hpp"

namespace fpnet {

Spectrum dft2(const ComplexField& field) {
  require(field.side() > 0, ErrorCode::Dimension, "dft2: empty field");
  require(field.px > 0.0, ErrorCode::Domain, "dft2: pixel pitch must be > 0");
  return {fft::forward_centered(field.data), 1.0 / (static_cast<double>(field.side()) * field.px),
          true};
}

ComplexField idft2(const Spectrum& spectrum) {
  require(spectrum.side() > 0, ErrorCode::Dimension, "idft2: empty spectrum");
  require(spectrum.dk > 0.0, ErrorCode::Domain, "idft2: bin spacing must be > 0");
  return {fft::inverse_centered(spectrum.data),
          1.0 / (static_cast<double>(spectrum.side()) * spectrum.dk)};
}

Spectrum disk_spectrum(std::size_t side, double dk, double cutoff) {
  Spectrum out{ComplexGrid(side), dk, true};
  const long c = static_cast<long>(side / 2);
  for (std::size_t r = 0; r < side; ++r) {
    const double v = static_cast<double>(static_cast<long>(r) - c);
    for (std::size_t col = 0; col < side; ++col) {
      const double u = static_cast<double>(static_cast<long>(col) - c);
      if (std::sqrt(u * u + v * v) * dk < cutoff) out.data(r, col) = 1.0;
    }
  }
  return out;
}

Spectrum make_ctf(const OpticsConfig& cfg) {
  require(cfg.n_high >= 2, ErrorCode::Config, "make_ctf: n_high must be >= 2");
  require(cfg.px_high > 0.0 && cfg.lambda_um > 0.0 && cfg.na > 0.0, ErrorCode::Config,
          "make_ctf: lambda, pixel pitch and na must be positive");
  return disk_spectrum(cfg.n_high, cfg.dk(), cfg.na / cfg.lambda_um);
}

Spectrum make_ctf_n(const OpticsConfig& cfg, std::size_t n, bool allow_wrap) {
  const Spectrum base = make_ctf(cfg);
  const BinShift s = cfg.shift(n);
  const long side = static_cast<long>(cfg.n_high);
  if (!allow_wrap) {
    for (long r = 0; r < side; ++r) {
      for (long c = 0; c < side; ++c) {
        if (base.data(r, c) == cplx{}) continue;
        const long rr = r + s.y;
        const long cc = c + s.x;
        require(rr >= 0 && rr < side && cc >= 0 && cc < side, ErrorCode::OutOfBand,
                "make_ctf_n: illumination " + std::to_string(n) +
                    " shifts the aperture outside the representable band");
      }
    }
  }
  return {fft::roll(base.data, s.y, s.x), base.dk, true};
}

ComplexField make_psf_n(const OpticsConfig& cfg, std::size_t n, bool allow_wrap) {
  return idft2(make_ctf_n(cfg, n, allow_wrap));
}

RealImage make_incoherent_psf(const OpticsConfig& cfg) {
  const ComplexField psf = idft2(make_ctf(cfg));
  RealGrid out(psf.side());
  double total = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::norm(psf.data[i]);
    total += out[i];
  }
  for (auto& v : out.values()) v /= total;
  return {std::move(out), psf.px};
}

ComplexGrid circular_convolve(const ComplexGrid& a, const ComplexGrid& b) {
  require_same_side(a.side(), b.side(), "circular_convolve");
  require(a.side() > 0, ErrorCode::Dimension, "circular_convolve: empty input");
  ComplexGrid fa = a;
  ComplexGrid fb = b;
  fft::transform_inplace(fa.values(), fa.side(), fft::Direction::Forward);
  fft::transform_inplace(fb.values(), fb.side(), fft::Direction::Forward);
  const double scale = 1.0 / static_cast<double>(a.size());
  for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i] * scale;
  fft::transform_inplace(fa.values(), fa.side(), fft::Direction::Inverse);
  return fa;
}

ComplexField circular_convolve(const ComplexField& a, const ComplexField& b) {
  return {circular_convolve(a.data, b.data), a.px};
}

RealGrid circular_convolve(const RealGrid& a, const RealGrid& b) {
  require_same_side(a.side(), b.side(), "circular_convolve");
  ComplexGrid ca(a.side());
  ComplexGrid cb(b.side());
  for (std::size_t i = 0; i < a.size(); ++i) {
    ca[i] = a[i];
    cb[i] = b[i];
  }
  const ComplexGrid prod = circular_convolve(ca, cb);
  RealGrid out(a.side());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = prod[i].real();
  return out;
}

RealGrid flip(const RealGrid& g) {
  const std::size_t n = g.side();
  RealGrid out(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) out((n - r) % n, (n - c) % n) = g(r, c);
  return out;
}

namespace {

struct Window {
  long row0;
  long col0;
};

Window window_origin(std::size_t side, BinShift shift, std::size_t m_side) {
  const long c = static_cast<long>(side / 2);
  const long half = static_cast<long>(m_side / 2);
  const Window w{c + shift.y - half, c + shift.x - half};
  const long end_r = w.row0 + static_cast<long>(m_side);
  const long end_c = w.col0 + static_cast<long>(m_side);
  require(m_side <= side && w.row0 >= 0 && w.col0 >= 0 && end_r <= static_cast<long>(side) &&
              end_c <= static_cast<long>(side),
          ErrorCode::OutOfBand,
          "sub-spectrum window of side " + std::to_string(m_side) + " at shift (" +
              std::to_string(shift.x) + ", " + std::to_string(shift.y) +
              ") lies outside the spectrum");
  return w;
}

}  // namespace

Spectrum crop_subspectrum(const Spectrum& spec, BinShift shift, std::size_t m_side) {
  const Window w = window_origin(spec.side(), shift, m_side);
  Spectrum out{ComplexGrid(m_side), spec.dk, true};
  for (std::size_t r = 0; r < m_side; ++r)
    for (std::size_t c = 0; c < m_side; ++c)
      out.data(r, c) = spec.data(static_cast<std::size_t>(w.row0) + r,
                                 static_cast<std::size_t>(w.col0) + c);
  return out;
}

Spectrum embed_subspectrum(const Spectrum& block, BinShift shift, std::size_t side) {
  const std::size_t m = block.side();
  const Window w = window_origin(side, shift, m);
  Spectrum out{ComplexGrid(side), block.dk, true};
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < m; ++c)
      out.data(static_cast<std::size_t>(w.row0) + r, static_cast<std::size_t>(w.col0) + c) =
          block.data(r, c);
  return out;
}

cplx inner(const ComplexGrid& a, const ComplexGrid& b) {
  require_same_side(a.side(), b.side(), "inner");
  cplx acc{};
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

double inner(const RealGrid& a, const RealGrid& b) {
  require_same_side(a.side(), b.side(), "inner");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double squared_norm(const ComplexGrid& a) {
  double acc = 0.0;
  for (const auto& v : a.values()) acc += std::norm(v);
  return acc;
}

}  // namespace fpnet
