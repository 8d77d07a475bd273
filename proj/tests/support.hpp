#pragma once

#include <optional>

#include "lublock/blocking.hpp"
#include "lublock/factorize.hpp"
#include "lublock/features.hpp"
#include "lublock/grid.hpp"
#include "lublock/matrix_io.hpp"
#include "lublock/symbolic.hpp"

namespace support {

using namespace lublock;

struct Pipeline {
  CscMatrix a;
  FilledPattern filled;
  BlockingPlan plan;
  BlockGrid grid;
  DependencyTree tree;
};

inline FilledPattern fill(const CscMatrix& a) { return symbolic_factorize(symmetrize_pattern(a)); }

inline BlockingPlan irregular_default(const FilledPattern& f) { return irregular_plan(percentage_curve(diag_block_pointer(f))); }

/// block_size 0 selects the irregular defaults.
inline Pipeline build(const CscMatrix& a, Index block_size) {
  Pipeline p;
  p.a = a;
  p.filled = fill(a);
  p.plan = block_size > 0 ? regular_plan(a.n, block_size) : irregular_default(p.filled);
  p.grid = partition(p.filled, p.a, p.plan);
  p.tree = dependency_levels(p.grid);
  return p;
}

inline Pipeline build(const CscMatrix& a, const BlockingPlan& plan) {
  Pipeline p;
  p.a = a;
  p.filled = fill(a);
  p.plan = plan;
  p.grid = partition(p.filled, p.a, p.plan);
  p.tree = dependency_levels(p.grid);
  return p;
}

inline BlockingPlan plan_from_positions(Index n, std::vector<Index> positions) {
  BlockingPlan plan;
  plan.n = n;
  plan.strategy = Strategy::irregular;
  plan.positions = std::move(positions);
  plan.validate();
  return plan;
}

inline CscMatrix identity(Index n) {
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return csc_from_triplets(n, t);
}

/// Block diagonal with dense diagonal blocks of size `bs`.
inline CscMatrix block_diagonal(Index blocks, Index bs) {
  std::vector<Triplet> t;
  for (Index b = 0; b < blocks; ++b) {
    for (Index i = 0; i < bs; ++i) {
      for (Index j = 0; j < bs; ++j) t.push_back({b * bs + i, b * bs + j, i == j ? 10.0 + i : 1.0 / (1 + i + j)});
    }
  }
  return csc_from_triplets(blocks * bs, t);
}

inline bool bitwise_equal(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) return false;
  for (size_t i = 0; i < x.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(x[i]) != std::bit_cast<std::uint64_t>(y[i])) return false;
  }
  return true;
}

inline bool bitwise_equal(const LUFactors& x, const LUFactors& y) {
  if (x.blocks.size() != y.blocks.size() || x.diag.size() != y.diag.size()) return false;
  for (size_t b = 0; b < x.blocks.size(); ++b) {
    if (x.blocks[b].row_idx != y.blocks[b].row_idx || !bitwise_equal(x.blocks[b].values, y.blocks[b].values)) return false;
  }
  for (size_t b = 0; b < x.diag.size(); ++b) {
    const auto& p = x.diag[b];
    const auto& q = y.diag[b];
    if (p.perm != q.perm || p.lower.row_idx != q.lower.row_idx || p.upper.row_idx != q.upper.row_idx) return false;
    if (!bitwise_equal(p.lower.values, q.lower.values) || !bitwise_equal(p.upper.values, q.upper.values)) return false;
  }
  return true;
}

}  // namespace support
