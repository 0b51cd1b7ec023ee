#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "core/error.hpp"
#include "core/optim.hpp"

using namespace fpnet;

namespace {

OptimizerConfig config(OptimizerKind kind, double lr) {
  OptimizerConfig cfg;
  cfg.kind = kind;
  cfg.lr = lr;
  return cfg;
}

}  // namespace

TEST_CASE("zero gradient leaves parameters unchanged") {
  for (OptimizerKind kind :
       {OptimizerKind::Sgd, OptimizerKind::Sgdm, OptimizerKind::RmsProp, OptimizerKind::Adam}) {
    std::vector<double> p{1.0, -2.0, 3.5};
    const std::vector<double> before = p, g(3, 0.0);
    OptState s;
    step(config(kind, 0.1), s, p, g);
    CHECK(p == before);
    CHECK(s.step_count == 1);
  }
}

TEST_CASE("adam first step") {
  std::vector<double> p{0.0};
  OptState s;
  step(config(OptimizerKind::Adam, 0.1), s, p, std::vector<double>{0.5});
  CHECK(p[0] == doctest::Approx(-0.1 * 0.5 / (0.5 + 1e-8)).epsilon(1e-14));
}

TEST_CASE("adam steps are bounded by lr") {
  std::vector<double> p{0.0, 0.0};
  OptState s;
  const OptimizerConfig cfg = config(OptimizerKind::Adam, 1e-3);
  for (int t = 0; t < 20; ++t) {
    const std::vector<double> before = p;
    step(cfg, s, p, std::vector<double>{-0.7, 1e6});
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(std::abs(p[i] - before[i]) <= 1e-3 * (1 + 1e-9));
  }
}

TEST_CASE("sgdm accumulates momentum") {
  std::vector<double> p{0.0};
  OptState s;
  const OptimizerConfig cfg = config(OptimizerKind::Sgdm, 0.1);
  step(cfg, s, p, std::vector<double>{2.0});
  const double after_one = p[0];
  step(cfg, s, p, std::vector<double>{2.0});
  CHECK(p[0] - after_one == doctest::Approx(-0.1 * 1.9 * 2.0).epsilon(1e-14));
}

TEST_CASE("sgdm without momentum equals sgd") {
  OptimizerConfig m = config(OptimizerKind::Sgdm, 0.05);
  m.momentum = 0.0;
  std::vector<double> a{1.0, 2.0}, b{1.0, 2.0};
  OptState sa, sb;
  for (int t = 0; t < 5; ++t) {
    const std::vector<double> g{std::sin(t), std::cos(t)};
    step(m, sa, a, g);
    step(config(OptimizerKind::Sgd, 0.05), sb, b, g);
  }
  CHECK(a == b);
}

TEST_CASE("rmsprop and adam follow hand recurrences for five steps") {
  const std::vector<double> gs{0.3, -1.0, 2.0, 0.0, -0.5};

  OptimizerConfig r = config(OptimizerKind::RmsProp, 0.01);
  r.decay = 0.0;
  std::vector<double> p{1.0};
  OptState s;
  double want = 1.0;
  for (double g : gs) {
    step(r, s, p, std::vector<double>{g});
    want -= 0.01 * g / (std::abs(g) + r.epsilon);
    CHECK(p[0] == doctest::Approx(want).epsilon(1e-14));
  }

  const OptimizerConfig a = config(OptimizerKind::Adam, 0.02);
  std::vector<double> q{1.0};
  OptState sa;
  double m = 0.0, v = 0.0, x = 1.0;
  for (std::size_t t = 1; t <= gs.size(); ++t) {
    const double g = gs[t - 1];
    step(a, sa, q, std::vector<double>{g});
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    const double mh = m / (1.0 - std::pow(0.9, t)), vh = v / (1.0 - std::pow(0.999, t));
    x -= 0.02 * mh / (std::sqrt(vh) + 1e-8);
    CHECK(q[0] == doctest::Approx(x).epsilon(1e-13));
  }
  CHECK(sa.step_count == gs.size());
}

TEST_CASE("rejected steps leave state untouched") {
  std::vector<double> p{1.0, 2.0};
  OptState s;
  const OptimizerConfig cfg = config(OptimizerKind::Adam, 0.1);
  step(cfg, s, p, std::vector<double>{0.1, 0.2});
  const std::vector<double> before = p;
  const OptState saved = s;
  try {
    step(cfg, s, p, std::vector<double>{NAN, 0.0});
    FAIL("expected a non-finite error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFinite);
  }
  CHECK(p == before);
  CHECK(s.m == saved.m);
  CHECK(s.v == saved.v);
  CHECK(s.step_count == saved.step_count);
  CHECK_THROWS_AS(step(cfg, s, p, std::vector<double>{1.0}), Error);
}

TEST_CASE("optimizer config validation") {
  OptimizerConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.lr = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.beta2 = 1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = {};
  cfg.epsilon = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  CHECK(parse_optimizer_kind("rmsprop") == OptimizerKind::RmsProp);
  CHECK_THROWS_AS(parse_optimizer_kind("lbfgs"), Error);
}

TEST_CASE("batches") {
  SUBCASE("singletons") {
    const auto all = batches({225, 1, 20, BatchOrder::Sequential, 0});
    CHECK(all.size() == 4500);
    CHECK(all[226] == Batch{1});
  }
  SUBCASE("full batch") {
    CHECK(epoch_batches({4, 4, 1, BatchOrder::Sequential, 0}, 0) == std::vector<Batch>{{0, 1, 2, 3}});
  }
  SUBCASE("remainder") {
    const auto e = epoch_batches({5, 2, 1, BatchOrder::Sequential, 0}, 0);
    REQUIRE(e.size() == 3);
    CHECK(e[0].size() == 2);
    CHECK(e[1].size() == 2);
    CHECK(e[2] == Batch{4});
  }
  SUBCASE("every index exactly once per epoch") {
    for (BatchOrder order : {BatchOrder::Sequential, BatchOrder::Shuffled})
      for (std::size_t n = 1; n <= 64; ++n)
        for (std::size_t bs = 1; bs <= n; ++bs) {
          const BatchSchedule sched{n, bs, 2, order, 3};
          for (std::size_t epoch = 0; epoch < 2; ++epoch) {
            const auto e = epoch_batches(sched, epoch);
            REQUIRE(e.size() == batches_per_epoch(n, bs));
            std::multiset<std::size_t> seen;
            for (const auto& b : e) seen.insert(b.begin(), b.end());
            REQUIRE(seen.size() == n);
            REQUIRE(std::set<std::size_t>(seen.begin(), seen.end()).size() == n);
            REQUIRE(*seen.rbegin() == n - 1);
          }
        }
  }
  SUBCASE("shuffling is seeded") {
    const BatchSchedule a{30, 4, 3, BatchOrder::Shuffled, 11};
    BatchSchedule b = a;
    CHECK(batches(a) == batches(b));
    b.seed = 12;
    CHECK(batches(a) != batches(b));
    CHECK(epoch_batches(a, 0) != epoch_batches(a, 1));
  }
  SUBCASE("invalid schedules") {
    CHECK_THROWS_AS(BatchSchedule({4, 5, 1, BatchOrder::Sequential, 0}).validate(), Error);
    CHECK_THROWS_AS(BatchSchedule({4, 0, 1, BatchOrder::Sequential, 0}).validate(), Error);
  }
}

TEST_CASE("update_count") {
  CHECK(update_count(20, 225, 1) == 4500);
  CHECK(update_count(20, 225, 64) == 80);
  CHECK(update_count(1, 10, 10) == 1);
  CHECK(update_count(0, 10, 3) == 0);
}
