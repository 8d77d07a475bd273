#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "support.hpp"

using namespace lublock;

namespace {

PercentCurve curve_of(Index n, std::vector<double> pct) {
  PercentCurve c;
  c.n = n;
  c.sample_points = static_cast<Index>(pct.size()) - 1;
  c.pct = std::move(pct);
  return c;
}

IrregularOptions opts(Index step, Index max_num, std::optional<double> thr) {
  IrregularOptions o;
  o.step = step;
  o.max_num = max_num;
  o.threshold = thr;
  return o;
}

std::vector<double> random_monotone(std::mt19937_64& rng, Index sp) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> inc(sp);
  const int style = static_cast<int>(rng() % 3);
  for (Index k = 0; k < sp; ++k) {
    double v = u(rng);
    if (style == 1) v = v < 0.9 ? 0.01 * v : 50.0 * v;     // rare jumps
    if (style == 2) v = v < 0.3 ? 0.0 : v * v;              // flat stretches
    inc[k] = v;
  }
  double total = 0.0;
  for (double v : inc) total += v;
  if (total == 0.0) inc.back() = total = 1.0;
  std::vector<double> pct(sp + 1, 0.0);
  double acc = 0.0;
  for (Index k = 0; k < sp; ++k) {
    acc += inc[k];
    pct[k + 1] = std::min(1.0, acc / total);
  }
  pct.back() = 1.0;
  return pct;
}

}  // namespace

TEST_CASE("frozen irregular plans") {
  const auto c1 = curve_of(1000, {0, .01, .02, .03, .04, .05, .06, .07, .08, .09, 1.0});
  CHECK(irregular_plan(c1, opts(2, 3, 0.2)).positions == std::vector<Index>{0, 800, 1000});

  const auto c2 = curve_of(1000, {0, .15, .30, .45, .60, .75, .80, .85, .90, .95, 1.0});
  CHECK(irregular_plan(c2, opts(2, 3, 0.2)).positions == std::vector<Index>{0, 200, 400, 600, 1000});

  std::vector<double> sq(11);
  for (int k = 0; k <= 10; ++k) sq[k] = k * k / 100.0;
  const auto c3 = curve_of(1000, sq);
  CHECK(irregular_plan(c3, opts(2, 3, 0.2)).positions == std::vector<Index>{0, 600, 800, 1000});

  for (const auto* c : {&c1, &c2, &c3}) {
    CHECK(irregular_plan(*c, opts(2, 3, 0.2)).positions == oracle::irregular_reference(c->pct, 1000, 2, 3, 0.2));
  }
}

TEST_CASE("irregular_plan parameters") {
  const auto c = curve_of(100, {0, .1, .2, .3, .4, .5, .6, .7, .8, .9, 1.0});
  CHECK_THROWS_AS(irregular_plan(c, opts(0, 3, {})), Error);
  CHECK_THROWS_AS(irregular_plan(c, opts(2, 0, {})), Error);
  CHECK_THROWS_AS(irregular_plan(c, opts(2, 3, 0.0)), Error);
  CHECK_THROWS_AS(irregular_plan(c, opts(2, 3, 1.5)), Error);
  const auto p = irregular_plan(c);
  CHECK(p.threshold == 0.2);
  CHECK(p.step == 2);
  CHECK(p.max_num == 3);
  // exactly linear: every window ties with the threshold
  CHECK(p.positions == std::vector<Index>{0, 20, 40, 60, 80, 100});
  // tiny curves clamp the window
  const auto tiny = curve_of(1, {0.0, 1.0});
  CHECK(irregular_plan(tiny).positions == std::vector<Index>{0, 1});
}

TEST_CASE("identity n=10000: near-regular spans well inside the bound") {
  const auto f = support::fill(support::identity(10000));
  const auto plan = support::irregular_default(f);
  CHECK(plan.max_span() <= 80);
  CHECK(plan.max_span() == 20);
  CHECK(plan.min_span() == 20);
}

TEST_CASE("arrowhead: border blocks are no wider than body blocks") {
  for (Index n : {1000, 3000}) {
    GeneratorParams gp;
    gp.border = n / 10;
    const auto plan = support::irregular_default(support::fill(generate(GeneratorKind::arrowhead, n, gp)));
    double body = 0, border = 0;
    Index nb = 0, nbo = 0;
    for (Index b = 0; b < plan.block_count(); ++b) {
      if (plan.positions[b] >= n - gp.border) {
        border += plan.span(b);
        ++nbo;
      } else if (plan.positions[b + 1] <= n - gp.border) {
        body += plan.span(b);
        ++nb;
      }
    }
    REQUIRE(nb > 0);
    REQUIRE(nbo > 0);
    CHECK(border / nbo <= body / nb);
  }
}

TEST_CASE("random monotone curves: valid plans, span bound, reference agreement") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 2 + static_cast<Index>(rng() % 5000);
    const Index sp = 2 + static_cast<Index>(rng() % std::min<Index>(n - 1, 400));
    const Index step = 1 + static_cast<Index>(rng() % std::min<Index>(sp - 1, 8));
    const Index max_num = 1 + static_cast<Index>(rng() % 5);
    const auto pct = random_monotone(rng, sp);
    const double thr = rng() % 2 ? static_cast<double>(step) / sp : 0.001 + 0.3 * static_cast<double>(rng() % 1000) / 1000.0;
    const auto plan = irregular_plan(curve_of(n, pct), opts(step, max_num, thr));
    CHECK_NOTHROW(plan.validate());
    const Index bound = ((max_num + 1) * step * n + sp - 1) / sp;
    CHECK(plan.max_span() <= bound);
    CHECK(plan.min_span() >= 1);
    CHECK(plan.positions == oracle::irregular_reference(pct, n, step, max_num, thr));

    auto over = opts(step, max_num, thr);
    over.overlapping_windows = true;
    CHECK_NOTHROW(irregular_plan(curve_of(n, pct), over).validate());
  }
}

TEST_CASE("regular_plan") {
  CHECK(regular_plan(10, 3).positions == std::vector<Index>{0, 3, 6, 9, 10});
  CHECK(regular_plan(10, 10).positions == std::vector<Index>{0, 10});
  CHECK(regular_plan(10, 1).positions == std::vector<Index>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  CHECK_THROWS_AS(regular_plan(10, 0), Error);
  CHECK_THROWS_AS(regular_plan(10, 11), Error);
  const auto p = regular_plan(10, 3);
  CHECK(p.block_of(0) == 0);
  CHECK(p.block_of(8) == 2);
  CHECK(p.block_of(9) == 3);
}

TEST_CASE("pangulu_size_select") {
  CHECK(pangulu_size_select(1000, 1000 * 1000 / 100) == 200);
  CHECK(pangulu_size_select(1000000, 10000000) == 2000);
  CHECK(std::min<Index>(150, pangulu_size_select(150, 150)) == 150);
  CHECK(pangulu_size_select(2500, 2500 * 100) == 300);
}

TEST_CASE("plan validation") {
  BlockingPlan p;
  p.n = 10;
  p.positions = {0, 5, 5, 10};
  CHECK_THROWS_AS(p.validate(), Error);
  p.positions = {0, 5, 9};
  CHECK_THROWS_AS(p.validate(), Error);
  p.positions = {1, 10};
  CHECK_THROWS_AS(p.validate(), Error);
  p.positions = {0, 4, 10};
  CHECK_NOTHROW(p.validate());
}
