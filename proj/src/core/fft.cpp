#include "fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace fpnet::fft {
namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t side, Direction dir) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_pair(side, dir);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<cplx> scratch(side * side);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    const int n = static_cast<int>(side);
    fftw_plan plan = fftw_plan_dft_2d(n, n, buf, buf,
                                      dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<std::size_t, Direction>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void transform_inplace(std::span<cplx> data, std::size_t side, Direction dir) {
  require(side > 0 && data.size() == side * side, ErrorCode::Dimension,
          "fft: data is not a non-empty square array");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(cache().get(side, dir), buf, buf);
}

ComplexGrid forward_centered(const ComplexGrid& field) {
  require(field.side() > 0, ErrorCode::Dimension, "dft2: empty input");
  ComplexGrid work = field;
  transform_inplace(work.values(), work.side(), Direction::Forward);
  const double scale = 1.0 / static_cast<double>(work.side());
  for (auto& v : work.values()) v *= scale;
  const long half = static_cast<long>(work.side() / 2);
  return roll(work, half, half);
}

ComplexGrid inverse_centered(const ComplexGrid& spectrum) {
  require(spectrum.side() > 0, ErrorCode::Dimension, "idft2: empty input");
  const long half = static_cast<long>(spectrum.side() / 2);
  ComplexGrid work = roll(spectrum, -half, -half);
  transform_inplace(work.values(), work.side(), Direction::Inverse);
  const double scale = 1.0 / static_cast<double>(work.side());
  for (auto& v : work.values()) v *= scale;
  return work;
}

}  // namespace fpnet::fft
