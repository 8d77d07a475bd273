#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "oracles.hpp"
#include "support.hpp"

using namespace lublock;

namespace {

// Explicit task DAG of right-looking blocked LU over a block-level pattern,
// with block-level fill, used to check counts and ASAP levels.
struct DagOracle {
  Index tasks = 0;
  Index levels = 0;
  std::map<std::tuple<int, Index, Index, Index>, Index> level;  // (kind, row, col, step)
};

DagOracle dag_oracle(Index p, std::set<std::pair<Index, Index>> blocks) {
  DagOracle d;
  std::map<std::pair<Index, Index>, Index> last;  // level of latest write per block
  auto prior = [&](Index r, Index c) {
    auto it = last.find({r, c});
    return it == last.end() ? Index(-1) : it->second;
  };
  for (Index i = 0; i < p; ++i) {
    const Index g = prior(i, i) + 1;
    d.level[{0, i, i, i}] = g;
    last[{i, i}] = g;
    std::vector<Index> us, ls;
    for (Index j = i + 1; j < p; ++j) {
      if (blocks.count({i, j})) us.push_back(j);
      if (blocks.count({j, i})) ls.push_back(j);
    }
    for (Index j : us) {
      const Index lv = std::max(g, prior(i, j)) + 1;
      d.level[{1, i, j, i}] = lv;
      last[{i, j}] = lv;
    }
    for (Index k : ls) {
      const Index lv = std::max(g, prior(k, i)) + 1;
      d.level[{2, k, i, i}] = lv;
      last[{k, i}] = lv;
    }
    for (Index j : us) {
      for (Index k : ls) {
        const Index lv = std::max({last[{k, i}], last[{i, j}], prior(k, j)}) + 1;
        d.level[{3, k, j, i}] = lv;
        last[{k, j}] = lv;
        blocks.insert({k, j});
      }
    }
    d.tasks += 1 + static_cast<Index>(us.size() + ls.size() + us.size() * ls.size());
  }
  for (const auto& [key, lv] : d.level) d.levels = std::max(d.levels, lv + 1);
  return d;
}

std::set<std::pair<Index, Index>> block_support(const FilledPattern& f, const BlockingPlan& plan) {
  std::set<std::pair<Index, Index>> s;
  for (Index c = 0; c < f.n; ++c) {
    for (Index r : f.rows_of(c)) s.insert({plan.block_of(r), plan.block_of(c)});
  }
  return s;
}

}  // namespace

TEST_CASE("partition of identity, dense and tridiagonal with plan [0,2,4]") {
  const auto plan = support::plan_from_positions(4, {0, 2, 4});
  const auto id = support::build(support::identity(4), plan);
  CHECK(id.grid.blocks.size() == 2);
  CHECK(id.grid.block_nnz(0, 0) == 2);
  CHECK(id.grid.block_nnz(1, 1) == 2);
  CHECK(id.grid.structure.find(0, 1) == -1);
  const auto& b = id.grid.blocks[id.grid.structure.find(1, 1)];
  CHECK(b.to_dense() == std::vector<double>{1, 0, 0, 1});

  const auto dense = support::build(generate(GeneratorKind::dense, 4), plan);
  CHECK(dense.grid.blocks.size() == 4);
  for (const auto& blk : dense.grid.blocks) CHECK(blk.nnz() == 4);

  const auto tri = support::build(generate(GeneratorKind::tridiagonal, 4), plan);
  CHECK(tri.grid.blocks.size() == 4);
  // 3n-2 = 10 entries: 4 in each diagonal block, 1 in each coupler
  CHECK(tri.grid.block_nnz(0, 0) == 4);
  CHECK(tri.grid.block_nnz(1, 1) == 4);
  CHECK(tri.grid.block_nnz(0, 1) == 1);
  CHECK(tri.grid.block_nnz(1, 0) == 1);
  CHECK(tri.grid.blocks[tri.grid.structure.find(1, 0)].at(0, 1) == tri.a.at(2, 1));
}

TEST_CASE("partition keeps values, nnz and diagonal blocks") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 5 + static_cast<Index>(rng() % 60);
    const auto a = oracle::random_symmetric_pattern(rng, n, 0.08, 1.0);
    const auto p = support::build(a, 1 + static_cast<Index>(rng() % n));
    CHECK(p.grid.total_nnz() == p.filled.nnz_filled());
    for (Index b = 0; b < p.plan.block_count(); ++b) CHECK(p.grid.structure.find(b, b) >= 0);
    for (size_t id = 0; id < p.grid.blocks.size(); ++id) {
      const auto [br, bc] = p.grid.structure.coords[id];
      const auto& blk = p.grid.blocks[id];
      for (LocalIndex c = 0; c < blk.cols; ++c) {
        for (Index q = blk.col_ptr[c]; q < blk.col_ptr[c + 1]; ++q) {
          const Index r = p.plan.positions[br] + blk.row_idx[q], col = p.plan.positions[bc] + c;
          CHECK(p.filled.contains(r, col));
          CHECK(blk.values[q] == a.at(r, col));
        }
      }
    }
  }
}

TEST_CASE("dependency_levels on the small shapes") {
  const auto one = support::build(generate(GeneratorKind::dense, 5), 5);
  CHECK(one.tree.task_count() == 1);
  CHECK(one.tree.level_count() == 1);

  const auto diag = support::build(support::block_diagonal(3, 4), 4);
  CHECK(diag.tree.task_count() == 3);
  CHECK(diag.tree.level_count() == 1);
  CHECK(diag.tree.levels()[0].tasks == 3);

  const auto dense = support::build(generate(GeneratorKind::dense, 6), 2);
  CHECK(dense.tree.level_count() == 7);
  CHECK(dense.tree.task_count() == 3 + 2 * 3 + 4 + 1);
}

TEST_CASE("task counts and ASAP levels match the explicit DAG") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = 4 + static_cast<Index>(rng() % 80);
    const auto a = oracle::random_symmetric_pattern(rng, n, 0.04 + 0.1 * (rng() % 3), 1.0);
    const Index bs = 1 + static_cast<Index>(rng() % std::max<Index>(1, n / 3));
    const auto p = support::build(a, trial % 4 == 0 ? 0 : bs);
    const auto d = dag_oracle(p.plan.block_count(), block_support(p.filled, p.plan));
    CHECK(p.tree.task_count() == d.tasks);
    CHECK(p.tree.level_count() == d.levels);
    Index primary_weight = 0;
    double flops = 0.0;
    for (const auto& t : p.tree.materialize()) {
      const int kind = static_cast<int>(t.kind);
      const auto it = d.level.find({kind, t.row, t.col, t.step});
      REQUIRE(it != d.level.end());
      CHECK(t.level == it->second);
      if (t.kind != TaskKind::ssssm) primary_weight += t.nnz_weight;
      flops += t.flops;
    }
    // each block is the output of exactly one GETRF, GESSM or TSTRF
    CHECK(primary_weight == p.filled.nnz_filled());

    // divisions plus multiply-adds of scalar elimination on the filled pattern
    double scalar = 0.0;
    for (Index k = 0; k < n; ++k) {
      Index below = 0;
      for (Index r : p.filled.rows_of(k)) below += r > k ? 1 : 0;
      scalar += static_cast<double>(below + below * below);
    }
    CHECK(flops == scalar);
  }
}

TEST_CASE("block-level fill blocks are materialized empty") {
  // (2,0) and (0,1) couple blocks 2 and 1 through block 0 with no scalar fill.
  const std::vector<Triplet> t{{0, 0, 4}, {1, 1, 4}, {2, 2, 4}, {3, 3, 4}, {2, 0, 1}, {0, 2, 1}, {1, 3, 1}, {3, 1, 1}};
  auto a = csc_from_triplets(4, t);
  const auto p = support::build(a, support::plan_from_positions(4, {0, 2, 3, 4}));
  CHECK(p.tree.fill_blocks().size() >= 1);
  for (const auto& c : p.tree.fill_blocks()) CHECK(c.row != c.col);
  CHECK(p.tree.grid_block_count() == static_cast<Index>(p.grid.blocks.size()));
}

TEST_CASE("for_each_update visits panel pairs j-major") {
  const auto p = support::build(generate(GeneratorKind::dense, 8), 2);
  std::vector<std::pair<Index, Index>> seen;
  p.tree.for_each_update(0, [&](const BlockRef& l, const BlockRef& u, Index target) {
    seen.push_back({l.index, u.index});
    CHECK(p.tree.structure().coords[target] == BlockCoord{l.index, u.index});
  });
  CHECK(seen.size() == 9);
  CHECK(seen.front() == std::pair<Index, Index>{1, 1});
  CHECK(seen[1] == std::pair<Index, Index>{2, 1});
}
