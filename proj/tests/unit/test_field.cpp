#include <doctest.h>

#include <cmath>
#include <numbers>

#include "core/error.hpp"
#include "core/field.hpp"
#include "helpers.hpp"
#include "support/oracles.hpp"

using namespace fpnet;
using testutil::max_abs;
using testutil::max_abs_diff;
using testutil::random_complex;
using testutil::random_real;

namespace {

OpticsConfig desk_optics() {
  OpticsConfig cfg;
  cfg.n_high = 64;
  cfg.stride = 4;
  cfg.wavevectors = {{0.0, 0.0}, {0.05, -0.1}, {-0.15, 0.05}};
  return cfg;
}

ComplexGrid direct_cyclic(const ComplexGrid& a, const ComplexGrid& b) {
  const std::size_t n = a.side();
  ComplexGrid out(n);
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t x = 0; x < n; ++x) {
      cplx acc = 0.0;
      for (std::size_t yy = 0; yy < n; ++yy)
        for (std::size_t xx = 0; xx < n; ++xx)
          acc += a(yy, xx) * b((y + n - yy) % n, (x + n - xx) % n);
      out(y, x) = acc;
    }
  return out;
}

}  // namespace

TEST_CASE("dft2 matches the direct-sum transform") {
  for (std::size_t side : {4u, 7u, 12u, 16u}) {
    const ComplexGrid x = random_complex(side, side);
    const Spectrum s = dft2({x, 1.0});
    CHECK(max_abs_diff(s.data, oracle::dft_centered(x)) < 1e-12);
  }
}

TEST_CASE("dft2 is unitary and idft2 inverts it") {
  for (std::size_t side : {8u, 64u, 256u}) {
    const ComplexGrid x = random_complex(side, 3 + side);
    const Spectrum s = dft2({x, 1.0});
    CHECK(std::abs(std::sqrt(squared_norm(s.data) / squared_norm(x)) - 1.0) < 1e-10);
    CHECK(max_abs_diff(idft2(s).data, x) < 1e-12);
  }
}

TEST_CASE("circular_convolve") {
  SUBCASE("delta kernel is the identity") {
    const ComplexGrid a = random_complex(6, 1);
    ComplexGrid delta(6);
    delta(0, 0) = 1.0;
    CHECK(max_abs_diff(circular_convolve(a, delta), a) < 1e-14);
  }
  SUBCASE("all-ones kernel sums the input") {
    const RealGrid a = random_real(5, 2);
    double total = 0.0;
    for (double v : a.values()) total += v;
    const RealGrid out = circular_convolve(a, RealGrid(5, 1.0));
    for (double v : out.values()) CHECK(v == doctest::Approx(total).epsilon(1e-12));
  }
  SUBCASE("matches the cyclic double sum on every size up to 8") {
    for (std::size_t side = 1; side <= 8; ++side) {
      const ComplexGrid a = random_complex(side, 10 + side);
      const ComplexGrid b = random_complex(side, 20 + side);
      CHECK(max_abs_diff(circular_convolve(a, b), direct_cyclic(a, b)) < 1e-12);
    }
  }
  SUBCASE("size mismatch") {
    CHECK_THROWS_AS(circular_convolve(RealGrid(4), RealGrid(5)), Error);
  }
}

TEST_CASE("decimate and zero_upsample") {
  const RealGrid x = random_real(8, 4);
  const RealGrid y = random_real(4, 5);
  CHECK(decimate(x, 1) == x);
  CHECK(zero_upsample(x, 1) == x);
  CHECK(decimate(zero_upsample(y, 2), 2) == y);
  CHECK(std::abs(inner(decimate(x, 2), y) - inner(x, zero_upsample(y, 2))) < 1e-14);
  const RealGrid up = zero_upsample(y, 2);
  CHECK(up(1, 0) == 0.0);
  CHECK(up(2, 4) == y(1, 2));
  try {
    (void)decimate(x, 3);
    FAIL("expected a dimension error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Dimension);
  }
}

TEST_CASE("crop_subspectrum and embed_subspectrum") {
  const ComplexGrid big = random_complex(16, 6);
  const Spectrum spec{big, 1.0};
  CHECK(crop_subspectrum(spec, {0, 0}, 16).data == big);

  const ComplexGrid block = random_complex(6, 7);
  const BinShift shift{3, -2};
  const Spectrum embedded = embed_subspectrum({block, 1.0}, shift, 16);
  CHECK(crop_subspectrum(embedded, shift, 6).data == block);

  const cplx lhs = inner(crop_subspectrum(spec, shift, 6).data, block);
  const cplx rhs = inner(big, embedded.data);
  CHECK(std::abs(lhs - rhs) < 1e-14);

  try {
    (void)crop_subspectrum(spec, {6, 0}, 6);
    FAIL("expected an out-of-band error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutOfBand);
  }
}

TEST_CASE("make_ctf is the strict disk of radius NA/lambda") {
  const OpticsConfig cfg = desk_optics();
  const Spectrum ctf = make_ctf(cfg);
  const long c = static_cast<long>(cfg.n_high / 2);
  const double radius = cfg.ctf_radius_bins();
  std::size_t expected = 0;
  for (long v = -c; v < c; ++v)
    for (long u = -c; u < c; ++u) {
      const bool inside = std::hypot(u, v) < radius;
      expected += inside;
      CHECK(ctf.data(static_cast<std::size_t>(c + v), static_cast<std::size_t>(c + u)) ==
            cplx(inside ? 1.0 : 0.0));
    }
  CHECK(expected > 0);
  // The circle condition is even.
  for (long v = 1 - c; v < c; ++v)
    for (long u = 1 - c; u < c; ++u)
      CHECK(ctf.data(static_cast<std::size_t>(c + v), static_cast<std::size_t>(c + u)) ==
            ctf.data(static_cast<std::size_t>(c - v), static_cast<std::size_t>(c - u)));
}

TEST_CASE("make_ctf_n translates the aperture and rejects out-of-band shifts") {
  OpticsConfig cfg = desk_optics();
  const long c = static_cast<long>(cfg.n_high / 2);
  const Spectrum base = make_ctf(cfg);
  for (std::size_t n = 0; n < cfg.wavevectors.size(); ++n) {
    const BinShift s = cfg.shift(n);
    const Spectrum shifted = make_ctf_n(cfg, n);
    for (long v = -10; v <= 10; ++v)
      for (long u = -10; u <= 10; ++u)
        CHECK(shifted.data(static_cast<std::size_t>(c + s.y + v),
                           static_cast<std::size_t>(c + s.x + u)) ==
              base.data(static_cast<std::size_t>(c + v), static_cast<std::size_t>(c + u)));
  }
  cfg.wavevectors = {{0.9, 0.0}};
  try {
    (void)make_ctf_n(cfg, 0);
    FAIL("expected an out-of-band error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutOfBand);
  }
  CHECK_NOTHROW((void)make_ctf_n(cfg, 0, true));
}

TEST_CASE("make_psf_n obeys the shift theorem") {
  const OpticsConfig cfg = desk_optics();
  const ComplexField psf0 = make_psf_n(cfg, 0);
  const double side = static_cast<double>(cfg.n_high);
  for (std::size_t n = 1; n < cfg.wavevectors.size(); ++n) {
    const BinShift s = cfg.shift(n);
    const ComplexField psf = make_psf_n(cfg, n);
    ComplexGrid expected(cfg.n_high);
    for (std::size_t y = 0; y < cfg.n_high; ++y)
      for (std::size_t x = 0; x < cfg.n_high; ++x)
        expected(y, x) = psf0.data(y, x) *
                         std::polar(1.0, 2.0 * std::numbers::pi *
                                             (s.x * static_cast<double>(x) +
                                              s.y * static_cast<double>(y)) /
                                             side);
    CHECK(max_abs_diff(psf.data, expected) < 1e-10 * max_abs(psf0.data));
  }
}

TEST_CASE("incoherent PSF has unit sum and is non-negative") {
  const RealImage psf = make_incoherent_psf(desk_optics());
  double total = 0.0;
  for (double v : psf.data.values()) {
    CHECK(v >= 0.0);
    total += v;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}
