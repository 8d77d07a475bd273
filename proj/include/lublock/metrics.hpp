#pragma once

#include <functional>
#include <span>
#include <vector>

#include "lublock/grid.hpp"

namespace lublock {

struct BlockNnzStats {
  Index blocks = 0;
  Index min = 0;
  Index max = 0;
  double mean = 0.0;
  /// Population standard deviation over the mean.
  double cv = 0.0;
};

/// Statistics over the nonempty blocks of a grid.
BlockNnzStats block_nnz_stats(const BlockGrid& grid);

/// Task weight used by the level statistics and the makespan model.
///   nnz:   output-block nnz for GETRF and the panels, min(input nnz) for updates.
///   flops: multiply-add (plus division) count of the kernel on the filled
///          pattern; the total over all tasks does not depend on the plan.
enum class CostModel { nnz, flops };

const char* to_string(CostModel c);
double task_cost(const Task& t, CostModel model);

struct LevelWork {
  Index level = 0;
  double total = 0.0;
  double max_task = 0.0;
  Index tasks = 0;
};

struct BalanceReport {
  BlockNnzStats per_block_nnz;
  std::vector<LevelWork> per_level_work;
  /// Work of the final elimination step over the total work.
  double last_level_share = 0.0;
  Index block_count = 0;
  /// Elimination steps with at least one task (the coarse per-step levels).
  Index step_levels = 0;
  double total_work = 0.0;
};

BalanceReport level_work_stats(const DependencyTree& tree, CostModel cost = CostModel::nnz);
BalanceReport balance_report(const BlockGrid& grid, const DependencyTree& tree, CostModel cost = CostModel::nnz);

/// Explicit DAG with predecessors in CSR form; tasks are topologically ordered.
struct TaskGraph {
  std::vector<double> cost;
  std::vector<Index> pred_ptr{0};
  std::vector<Index> preds;

  Index size() const { return static_cast<Index>(cost.size()); }
  void add(double c, std::span<const Index> p);
};

TaskGraph task_graph(const DependencyTree& tree, const std::function<double(const Task&)>& cost);
TaskGraph task_graph(const DependencyTree& tree, CostModel cost = CostModel::flops);

/// Greedy list scheduling on `workers` identical units; among ready tasks the
/// largest runs first (ties: lower task index). Returns the finish time.
double makespan(const TaskGraph& g, Index workers);
double critical_path(const TaskGraph& g);
double total_cost(const TaskGraph& g);

double makespan_model(const DependencyTree& tree, Index workers, CostModel cost = CostModel::flops);

}  // namespace lublock
