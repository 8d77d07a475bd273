#include <doctest.h>

#include <random>

#include "lublock/metrics.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace lublock;

namespace {

TaskGraph chain(Index k) {
  TaskGraph g;
  for (Index t = 0; t < k; ++t) {
    const std::vector<Index> p = t ? std::vector<Index>{t - 1} : std::vector<Index>{};
    g.add(1.0, p);
  }
  return g;
}

}  // namespace

TEST_CASE("block_nnz_stats") {
  const auto id = support::build(support::identity(8), 2);
  const auto s = block_nnz_stats(id.grid);
  CHECK(s.blocks == 4);
  CHECK(s.min == 2);
  CHECK(s.max == 2);
  CHECK(s.cv == 0.0);

  const auto dense = support::build(generate(GeneratorKind::dense, 4), 2);
  const auto d = block_nnz_stats(dense.grid);
  CHECK(d.blocks == 4);
  CHECK(d.mean == 4.0);
  CHECK(d.cv == 0.0);

  const auto tri = support::build(generate(GeneratorKind::tridiagonal, 4), support::plan_from_positions(4, {0, 2, 4}));
  const auto t = block_nnz_stats(tri.grid);
  // nnz 4, 1, 1, 4: mean 2.5, population sd 1.5
  CHECK(t.mean == 2.5);
  CHECK(t.cv == doctest::Approx(0.6));
}

TEST_CASE("arrowhead n=1000 b=100: regular bs=100 is less balanced than irregular") {
  GeneratorParams gp;
  gp.border = 100;
  const auto a = generate(GeneratorKind::arrowhead, 1000, gp);
  const auto irr = support::build(a, 0);
  const auto reg = support::build(a, 100);
  CHECK(block_nnz_stats(reg.grid).cv > block_nnz_stats(irr.grid).cv);
  CHECK(makespan_model(irr.tree, 4) <= makespan_model(reg.tree, 4));
  CHECK(level_work_stats(irr.tree).last_level_share <= level_work_stats(reg.tree).last_level_share);
}

TEST_CASE("level_work_stats on trivial trees") {
  const auto diag = support::build(support::block_diagonal(3, 4), 4);
  const auto r = level_work_stats(diag.tree);
  REQUIRE(r.per_level_work.size() == 1);
  CHECK(r.per_level_work[0].tasks == 3);
  CHECK(r.per_level_work[0].max_task * 3 == r.per_level_work[0].total);

  const auto one = support::build(generate(GeneratorKind::dense, 7), 7);
  const auto s = level_work_stats(one.tree);
  CHECK(s.per_level_work.size() == 1);
  CHECK(s.per_level_work[0].tasks == 1);
  CHECK(s.last_level_share == 1.0);
}

TEST_CASE("3x3 grid with a dense last block row and column") {
  // Blocks of size 2: diagonal blocks plus the border couplings (0,2),(2,0),(1,2),(2,1).
  std::vector<Triplet> t;
  for (Index i = 0; i < 6; ++i) t.push_back({i, i, 10.0});
  for (Index i = 0; i < 4; ++i) {
    for (Index j = 4; j < 6; ++j) {
      t.push_back({i, j, 1.0});
      t.push_back({j, i, 1.0});
    }
  }
  t.push_back({4, 5, 1.0});
  t.push_back({5, 4, 1.0});
  const auto p = support::build(csc_from_triplets(6, t), 2);
  CHECK(p.grid.blocks.size() == 7);
  const auto& steps = p.tree.step_stats();
  REQUIRE(steps.size() == 3);
  // step 0: GETRF(0,0)=2, GESSM(0,2)=4, TSTRF(2,0)=4, SSSSM(2,2,0)=min(4,4)
  CHECK(steps[0].tasks == 4);
  CHECK(steps[0].nnz_total == 2 + 4 + 4 + 4);
  CHECK(steps[1].tasks == 4);
  CHECK(steps[1].nnz_total == 2 + 4 + 4 + 4);
  CHECK(steps[2].tasks == 1);
  CHECK(steps[2].nnz_total == 4);
  const auto r = level_work_stats(p.tree);
  CHECK(r.last_level_share == doctest::Approx(4.0 / 32.0));
  CHECK(r.step_levels == 3);
}

TEST_CASE("makespan model") {
  for (Index w : {1, 2, 7}) CHECK(makespan(chain(3), w) == 3.0);
  TaskGraph four;
  for (int k = 0; k < 4; ++k) four.add(1.0, {});
  CHECK(makespan(four, 2) == 2.0);
  CHECK(critical_path(chain(3)) == 3.0);
  CHECK_THROWS_AS(makespan(four, 0), Error);

  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 10 + static_cast<Index>(rng() % 80);
    const auto a = oracle::random_symmetric_pattern(rng, n, 0.1, 1.0);
    const auto p = support::build(a, 1 + static_cast<Index>(rng() % 10));
    for (CostModel cost : {CostModel::nnz, CostModel::flops}) {
      const auto g = task_graph(p.tree, cost);
      CHECK(g.size() == p.tree.task_count());
      CHECK(makespan(g, 1) == doctest::Approx(total_cost(g)).epsilon(1e-12));
      for (Index w : {2, 4, 8}) {
        const double m = makespan(g, w);
        CHECK(m >= critical_path(g) * (1 - 1e-12));
        CHECK(m >= total_cost(g) / w * (1 - 1e-12));
        CHECK(m == makespan(g, w));
      }
    }
  }
}
