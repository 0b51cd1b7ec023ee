#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include "core/grid.hpp"

namespace testutil {

inline fpnet::RealGrid random_real(std::size_t side, std::uint64_t seed, double lo = -1.0,
                                   double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  fpnet::RealGrid g(side);
  for (auto& v : g.values()) v = u(rng);
  return g;
}

inline fpnet::ComplexGrid random_complex(std::size_t side, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  fpnet::ComplexGrid g(side);
  for (auto& v : g.values()) v = {u(rng), u(rng)};
  return g;
}

template <class A, class B>
double max_abs_diff(const A& a, const B& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

template <class A>
double max_abs(const A& a) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i]));
  return worst;
}

}  // namespace testutil
