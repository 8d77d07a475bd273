#include "lublock/grid.hpp"

#include <algorithm>
#include <string>

namespace lublock {

SparseBlock SparseBlock::empty(LocalIndex rows, LocalIndex cols) {
  SparseBlock b;
  b.rows = rows;
  b.cols = cols;
  b.col_ptr.assign(cols + 1, 0);
  return b;
}

double SparseBlock::at(LocalIndex r, LocalIndex c) const {
  auto rs = rows_of(c);
  auto it = std::lower_bound(rs.begin(), rs.end(), r);
  if (it == rs.end() || *it != r) return 0.0;
  return values[col_ptr[c] + (it - rs.begin())];
}

std::vector<double> SparseBlock::to_dense() const {
  std::vector<double> d(static_cast<size_t>(rows) * cols, 0.0);
  for (LocalIndex c = 0; c < cols; ++c) {
    for (LocalIndex q = col_ptr[c]; q < col_ptr[c + 1]; ++q) d[static_cast<size_t>(c) * rows + row_idx[q]] = values[q];
  }
  return d;
}

SparseBlock SparseBlock::from_dense(LocalIndex rows, LocalIndex cols, std::span<const double> dense) {
  SparseBlock b = empty(rows, cols);
  for (LocalIndex c = 0; c < cols; ++c) {
    for (LocalIndex r = 0; r < rows; ++r) {
      const double v = dense[static_cast<size_t>(c) * rows + r];
      if (v != 0.0) {
        b.row_idx.push_back(r);
        b.values.push_back(v);
      }
    }
    b.col_ptr[c + 1] = static_cast<LocalIndex>(b.row_idx.size());
  }
  return b;
}

Index BlockStructure::find(Index block_row, Index block_col) const {
  const auto& col = by_col[block_col];
  auto it = std::lower_bound(col.begin(), col.end(), block_row, [](const BlockRef& r, Index v) { return r.index < v; });
  return (it != col.end() && it->index == block_row) ? it->id : -1;
}

Index BlockStructure::add(Index block_row, Index block_col) {
  const Index id = static_cast<Index>(coords.size());
  coords.push_back({block_row, block_col});
  auto insert = [](std::vector<BlockRef>& list, Index index, Index id) {
    auto it = std::lower_bound(list.begin(), list.end(), index, [](const BlockRef& r, Index v) { return r.index < v; });
    list.insert(it, BlockRef{index, id});
  };
  insert(by_col[block_col], block_row, id);
  insert(by_row[block_row], block_col, id);
  return id;
}

Index BlockGrid::block_nnz(Index block_row, Index block_col) const {
  const Index id = structure.find(block_row, block_col);
  return id < 0 ? 0 : blocks[id].nnz();
}

Index BlockGrid::total_nnz() const {
  Index s = 0;
  for (const auto& b : blocks) s += b.nnz();
  return s;
}

BlockGrid partition(const FilledPattern& f, const CscMatrix& a, const BlockingPlan& plan) {
  if (f.n != a.n || plan.n != f.n) throw Error(ErrorKind::DimensionMismatch, "pattern, matrix and plan orders differ");
  plan.validate();

  BlockGrid grid;
  grid.plan = plan;
  const Index p = plan.block_count();
  grid.structure.p = p;
  grid.structure.by_col.resize(p);
  grid.structure.by_row.resize(p);

  // Row -> block lookup.
  std::vector<Index> block_of_row(f.n);
  for (Index b = 0; b < p; ++b) {
    for (Index r = plan.positions[b]; r < plan.positions[b + 1]; ++r) block_of_row[r] = b;
  }

  std::vector<Index> id_in_col(p, -1);
  for (Index bj = 0; bj < p; ++bj) {
    const Index first = plan.positions[bj];
    const Index last = plan.positions[bj + 1];
    const auto cols = static_cast<LocalIndex>(last - first);

    std::vector<Index> present;
    for (Index c = first; c < last; ++c) {
      for (Index r : f.rows_of(c)) {
        const Index bi = block_of_row[r];
        if (id_in_col[bi] < 0) {
          id_in_col[bi] = 0;
          present.push_back(bi);
        }
      }
    }
    std::sort(present.begin(), present.end());
    for (Index bi : present) {
      id_in_col[bi] = grid.structure.add(bi, bj);
      grid.blocks.push_back(SparseBlock::empty(static_cast<LocalIndex>(plan.span(bi)), cols));
    }

    for (Index c = first; c < last; ++c) {
      const auto a_rows = a.rows_of(c);
      const auto a_vals = a.values_of(c);
      size_t q = 0;
      for (Index r : f.rows_of(c)) {
        while (q < a_rows.size() && a_rows[q] < r) ++q;
        const double v = (q < a_rows.size() && a_rows[q] == r) ? a_vals[q] : 0.0;
        auto& blk = grid.blocks[id_in_col[block_of_row[r]]];
        blk.row_idx.push_back(static_cast<LocalIndex>(r - plan.positions[block_of_row[r]]));
        blk.values.push_back(v);
      }
      for (Index bi : present) {
        auto& blk = grid.blocks[id_in_col[bi]];
        blk.col_ptr[c - first + 1] = static_cast<LocalIndex>(blk.row_idx.size());
      }
    }
    for (Index bi : present) id_in_col[bi] = -1;
  }
  return grid;
}

const char* to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::getrf: return "GETRF";
    case TaskKind::gessm: return "GESSM";
    case TaskKind::tstrf: return "TSTRF";
    case TaskKind::ssssm: return "SSSSM";
  }
  return "?";
}

namespace {

// Calls fn(l_ref, u_ref, target) for every (k, j) pair of step i, j-major.
template <typename Fn>
void updates_of_step(const BlockStructure& s, const StepPlan& step, Fn&& fn) {
  if (step.l_panels.empty()) return;
  for (const BlockRef& u : step.u_panels) {
    const auto& col = s.by_col[u.index];
    auto it = col.begin();
    for (const BlockRef& l : step.l_panels) {
      it = std::lower_bound(it, col.end(), l.index, [](const BlockRef& r, Index v) { return r.index < v; });
      const Index target = (it != col.end() && it->index == l.index) ? it->id : -1;
      fn(l, u, target);
    }
  }
}

}  // namespace

template <typename Visit>
void DependencyTree::walk(Visit&& visit) const {
  std::vector<Index> last_write(structure_.coords.size(), -1);
  Task t;
  for (Index i = 0; i < p(); ++i) {
    const StepPlan& step = steps_[i];
    t = Task{TaskKind::getrf, i, i, i, step.diag, last_write[step.diag] + 1, block_counts_[step.diag].nnz,
             getrf_flops(step.diag)};
    last_write[step.diag] = t.level;
    visit(t);
    const Index getrf_level = t.level;

    for (const BlockRef& u : step.u_panels) {
      t = Task{TaskKind::gessm, i, i, u.index, u.id, std::max(getrf_level, last_write[u.id]) + 1,
               block_counts_[u.id].nnz, gessm_flops(step.diag, u.id)};
      last_write[u.id] = t.level;
      visit(t);
    }
    for (const BlockRef& l : step.l_panels) {
      t = Task{TaskKind::tstrf, i, l.index, i, l.id, std::max(getrf_level, last_write[l.id]) + 1,
               block_counts_[l.id].nnz, tstrf_flops(step.diag, l.id)};
      last_write[l.id] = t.level;
      visit(t);
    }
    updates_of_step(structure_, step, [&](const BlockRef& l, const BlockRef& u, Index target) {
      t = Task{TaskKind::ssssm, i, l.index, u.index, target,
               std::max({last_write[l.id], last_write[u.id], last_write[target]}) + 1,
               std::min(block_counts_[l.id].nnz, block_counts_[u.id].nnz), ssssm_flops(l.id, u.id)};
      last_write[target] = t.level;
      visit(t);
    });
  }
}

double DependencyTree::getrf_flops(Index block) const {
  const Index d = structure_.coords[block].row;
  double f = 0.0;
  for (size_t t = 0; t < diag_lower_[d].size(); ++t) {
    f += static_cast<double>(diag_lower_[d][t]) * (diag_upper_[d][t] + 1.0);
  }
  return f;
}

double DependencyTree::gessm_flops(Index diag, Index block) const {
  const Index d = structure_.coords[diag].row;
  const auto& bc = block_counts_[block];
  double f = 0.0;
  for (size_t t = 0; t < diag_lower_[d].size(); ++t) f += static_cast<double>(diag_lower_[d][t]) * counts_[bc.row_offset + t];
  return f;
}

double DependencyTree::tstrf_flops(Index diag, Index block) const {
  const Index d = structure_.coords[diag].row;
  const auto& bc = block_counts_[block];
  double f = static_cast<double>(bc.nnz);
  for (size_t t = 0; t < diag_upper_[d].size(); ++t) f += static_cast<double>(counts_[bc.col_offset + t]) * diag_upper_[d][t];
  return f;
}

double DependencyTree::ssssm_flops(Index lower, Index upper) const {
  const auto& lc = block_counts_[lower];
  const auto& uc = block_counts_[upper];
  if (lc.nnz == 0 || uc.nnz == 0) return 0.0;
  const Index m = static_cast<Index>(diag_lower_[structure_.coords[lower].col].size());
  double f = 0.0;
  for (Index t = 0; t < m; ++t) f += static_cast<double>(counts_[lc.col_offset + t]) * counts_[uc.row_offset + t];
  return f;
}

void DependencyTree::for_each_task(const std::function<void(const Task&)>& fn) const { walk(fn); }

std::vector<Task> DependencyTree::materialize() const {
  std::vector<Task> tasks;
  tasks.reserve(task_count_);
  walk([&](const Task& t) { tasks.push_back(t); });
  return tasks;
}

void DependencyTree::for_each_update(Index step,
                                     const std::function<void(const BlockRef&, const BlockRef&, Index)>& fn) const {
  updates_of_step(structure_, steps_[step], fn);
}

DependencyTree dependency_levels(const BlockGrid& grid) {
  DependencyTree tree;
  tree.structure_ = grid.structure;
  tree.grid_blocks_ = static_cast<Index>(grid.blocks.size());
  BlockStructure& s = tree.structure_;
  const Index p = s.p;

  // Block-level symbolic elimination: materialize update targets that have
  // no filled support. New blocks only appear at (k, j) with k, j > i.
  tree.steps_.resize(p);
  for (Index i = 0; i < p; ++i) {
    StepPlan& step = tree.steps_[i];
    step.diag = s.find(i, i);
    if (step.diag < 0) throw Error(ErrorKind::MissingDiagonal, "diagonal block " + std::to_string(i) + " is empty");
    for (const BlockRef& r : s.by_row[i]) {
      if (r.index > i) step.u_panels.push_back(r);
    }
    for (const BlockRef& r : s.by_col[i]) {
      if (r.index > i) step.l_panels.push_back(r);
    }
    for (const BlockRef& u : step.u_panels) {
      std::vector<Index> missing;
      for (const BlockRef& l : step.l_panels) {
        if (s.find(l.index, u.index) < 0) missing.push_back(l.index);
      }
      for (Index k : missing) s.add(k, u.index);
    }
  }

  // Pattern counts for the flop model; fill blocks have none.
  const Index blocks = static_cast<Index>(s.coords.size());
  tree.block_counts_.resize(blocks);
  for (Index id = 0; id < blocks; ++id) {
    auto& bc = tree.block_counts_[id];
    const Index rows = grid.plan.span(s.coords[id].row);
    const Index cols = grid.plan.span(s.coords[id].col);
    bc.col_offset = static_cast<Index>(tree.counts_.size());
    bc.row_offset = bc.col_offset + cols;
    tree.counts_.resize(tree.counts_.size() + cols + rows, 0);
    if (id >= tree.grid_blocks_) continue;
    const SparseBlock& b = grid.blocks[id];
    bc.nnz = b.nnz();
    for (LocalIndex c = 0; c < b.cols; ++c) {
      tree.counts_[bc.col_offset + c] = b.col_ptr[c + 1] - b.col_ptr[c];
      for (LocalIndex r : b.rows_of(c)) ++tree.counts_[bc.row_offset + r];
    }
  }
  tree.diag_lower_.resize(p);
  tree.diag_upper_.resize(p);
  for (Index i = 0; i < p; ++i) {
    const SparseBlock& b = grid.blocks[tree.steps_[i].diag];
    tree.diag_lower_[i].assign(b.cols, 0);
    tree.diag_upper_[i].assign(b.rows, 0);
    for (LocalIndex c = 0; c < b.cols; ++c) {
      for (LocalIndex r : b.rows_of(c)) {
        if (r > c) ++tree.diag_lower_[i][c];
        if (r < c) ++tree.diag_upper_[i][r];
      }
    }
  }

  tree.update_counts_.assign(blocks, 0);
  tree.step_stats_.assign(p, LevelStats{});
  auto add = [](LevelStats& st, const Task& t) {
    ++st.tasks;
    st.nnz_total += t.nnz_weight;
    st.nnz_max = std::max(st.nnz_max, t.nnz_weight);
    st.flops_total += t.flops;
    st.flops_max = std::max(st.flops_max, t.flops);
  };
  tree.walk([&](const Task& t) {
    if (t.kind == TaskKind::ssssm) ++tree.update_counts_[t.target];
    if (t.level >= static_cast<Index>(tree.levels_.size())) tree.levels_.resize(t.level + 1);
    add(tree.levels_[t.level], t);
    add(tree.step_stats_[t.step], t);
    ++tree.task_count_;
  });
  return tree;
}

}  // namespace lublock
