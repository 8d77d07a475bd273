#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "lublock/blocking.hpp"
#include "lublock/csc_matrix.hpp"
#include "lublock/symbolic.hpp"

namespace lublock {

using LocalIndex = std::int32_t;

/// CSC submatrix with block-local indices.
struct SparseBlock {
  LocalIndex rows = 0;
  LocalIndex cols = 0;
  std::vector<LocalIndex> col_ptr{0};
  std::vector<LocalIndex> row_idx;
  std::vector<double> values;

  static SparseBlock empty(LocalIndex rows, LocalIndex cols);

  Index nnz() const { return col_ptr.empty() ? 0 : col_ptr.back(); }
  bool is_empty() const { return nnz() == 0; }

  std::span<const LocalIndex> rows_of(LocalIndex c) const {
    return {row_idx.data() + col_ptr[c], static_cast<size_t>(col_ptr[c + 1] - col_ptr[c])};
  }
  std::span<const double> values_of(LocalIndex c) const {
    return {values.data() + col_ptr[c], static_cast<size_t>(col_ptr[c + 1] - col_ptr[c])};
  }

  double at(LocalIndex r, LocalIndex c) const;
  std::vector<double> to_dense() const;  // column-major
  static SparseBlock from_dense(LocalIndex rows, LocalIndex cols, std::span<const double> dense);
};

struct BlockCoord {
  Index row = 0;
  Index col = 0;
  friend bool operator==(const BlockCoord&, const BlockCoord&) = default;
};

/// (block index along the other dimension, block id)
struct BlockRef {
  Index index = 0;
  Index id = 0;
};

/// Sorted per-row and per-column lists of nonempty blocks.
struct BlockStructure {
  Index p = 0;
  std::vector<BlockCoord> coords;
  std::vector<std::vector<BlockRef>> by_col;  // block rows, ascending
  std::vector<std::vector<BlockRef>> by_row;  // block cols, ascending

  /// Block id at (block_row, block_col), or -1.
  Index find(Index block_row, Index block_col) const;
  Index add(Index block_row, Index block_col);
};

/// 2D sparse block partition of the filled matrix. Only nonempty blocks are
/// stored; every diagonal block is present.
struct BlockGrid {
  BlockingPlan plan;
  BlockStructure structure;
  std::vector<SparseBlock> blocks;

  Index p() const { return structure.p; }
  Index block_nnz(Index block_row, Index block_col) const;
  Index total_nnz() const;
  Index block_rows(Index b) const { return plan.span(b); }
};

/// Blocks hold the filled pattern restricted to their ranges, with values
/// from `a` and 0.0 at fill positions.
BlockGrid partition(const FilledPattern& f, const CscMatrix& a, const BlockingPlan& plan);

enum class TaskKind : std::uint8_t { getrf, gessm, tstrf, ssssm };

const char* to_string(TaskKind kind);

/// One block kernel invocation. GETRF(i,i), GESSM(i,j), TSTRF(k,i) and
/// SSSSM(k,j,i) all report `step` = i and the output block (row, col).
struct Task {
  TaskKind kind = TaskKind::getrf;
  Index step = 0;
  Index row = 0;
  Index col = 0;
  Index target = 0;  // output block id
  Index level = 0;
  Index nnz_weight = 0;
  double flops = 0.0;
};

struct StepPlan {
  Index diag = 0;                   // block id of (i,i)
  std::vector<BlockRef> u_panels;   // (j, id of (i,j)), j > i
  std::vector<BlockRef> l_panels;   // (k, id of (k,i)), k > i
};

struct LevelStats {
  Index tasks = 0;
  Index nnz_total = 0;
  Index nnz_max = 0;
  double flops_total = 0.0;
  double flops_max = 0.0;
};

/// Level-ordered task DAG of right-looking blocked LU.
///
/// Schur updates are implicit: step i updates every (k,j) pair of its L and U
/// panel lists, so the tree stays O(blocks) in memory. Tasks get the earliest
/// level consistent with their dependencies; updates to one block are chained
/// in ascending step order.
class DependencyTree {
 public:
  Index p() const { return structure_.p; }
  const BlockStructure& structure() const { return structure_; }
  const std::vector<StepPlan>& steps() const { return steps_; }

  /// Blocks with no filled-pattern support that updates still target.
  std::span<const BlockCoord> fill_blocks() const {
    return {structure_.coords.data() + grid_blocks_, structure_.coords.size() - grid_blocks_};
  }
  Index grid_block_count() const { return grid_blocks_; }

  Index task_count() const { return task_count_; }
  Index level_count() const { return static_cast<Index>(levels_.size()); }
  const std::vector<LevelStats>& levels() const { return levels_; }
  /// Coarse view: all tasks of elimination step i.
  const std::vector<LevelStats>& step_stats() const { return step_stats_; }
  /// Number of Schur updates targeting each block id.
  const std::vector<Index>& update_counts() const { return update_counts_; }

  /// Tasks in right-looking order (GETRF, U panels, L panels, updates per step).
  void for_each_task(const std::function<void(const Task&)>& fn) const;
  std::vector<Task> materialize() const;

  /// Calls fn(l_panel, u_panel, target_id) for every update of step i,
  /// j-major; l_panel = (k, id of (k,i)), u_panel = (j, id of (i,j)).
  void for_each_update(Index step, const std::function<void(const BlockRef&, const BlockRef&, Index)>& fn) const;

 private:
  friend DependencyTree dependency_levels(const BlockGrid& grid);

  struct BlockCounts {
    Index nnz = 0;
    Index col_offset = 0;  // into counts_: per local column nnz, then per local row nnz
    Index row_offset = 0;
  };

  template <typename Visit>
  void walk(Visit&& visit) const;

  double getrf_flops(Index block) const;
  double gessm_flops(Index diag, Index block) const;
  double tstrf_flops(Index diag, Index block) const;
  double ssssm_flops(Index lower, Index upper) const;

  BlockStructure structure_;
  Index grid_blocks_ = 0;
  std::vector<StepPlan> steps_;
  std::vector<BlockCounts> block_counts_;
  std::vector<LocalIndex> counts_;
  // Strictly lower per column / strictly upper per row of each diagonal block.
  std::vector<std::vector<LocalIndex>> diag_lower_;
  std::vector<std::vector<LocalIndex>> diag_upper_;
  std::vector<LevelStats> levels_;
  std::vector<LevelStats> step_stats_;
  std::vector<Index> update_counts_;
  Index task_count_ = 0;
};

/// Builds the task DAG; updates into blocks without filled support
/// materialize them (as empty blocks) in the tree's structure.
DependencyTree dependency_levels(const BlockGrid& grid);

}  // namespace lublock
