#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "objective.hpp"

namespace fpnet {

struct FdReport {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::size_t excluded_kinks = 0;
};

struct FdOptions {
  double step = 1e-5;
  std::size_t samples = 200;  // all parameters are checked when fewer exist
  std::uint64_t seed = 0;
};

// Central differences (f(p+h) - f(p-h)) / 2h against `analytic` on a seeded
// random subset of parameters. Relative error is measured against
// max(|fd|, |analytic|, 1e-3 * max|analytic|) so entries far below the
// gradient scale do not report pure rounding noise. Parameters whose
// perturbation changes `kinks` are excluded.
FdReport finite_difference_check(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> params, std::span<const double> analytic, const FdOptions& options,
    const std::function<std::vector<std::int8_t>(std::span<const double>)>& kinks = {});

// Small random problem for one of the four models.
struct GradcheckProblem {
  std::unique_ptr<Objective> objective;
  std::vector<double> params;
  Batch batch;
};

GradcheckProblem make_gradcheck_problem(LossTarget model, LossNorm norm, std::size_t size,
                                        std::uint64_t seed);

// Builds the problem, evaluates the analytic gradient (optionally corrupted
// by a relative 1e-3 bias as a negative control) and runs the check.
FdReport finite_diff_check(LossTarget model, LossNorm norm, std::size_t size,
                           std::uint64_t seed, double step, bool corrupt_gradient = false);

// Tolerance used by the acceptance gate: 1e-6 for L2 losses, 1e-5 for L1.
inline double gradcheck_tolerance(LossNorm norm) { return norm == LossNorm::L2 ? 1e-6 : 1e-5; }

}  // namespace fpnet
