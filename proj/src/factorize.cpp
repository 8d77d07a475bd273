#include "lublock/factorize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <exception>
#include <mutex>
#include <thread>

namespace lublock {

namespace {

class Executor {
 public:
  Executor(const BlockGrid& grid, const DependencyTree& tree, const FactorOptions& options)
      : tree_(tree), options_(options) {
    const auto& s = tree.structure();
    f_.plan = grid.plan;
    f_.structure = s;
    f_.blocks.reserve(s.coords.size());
    f_.blocks.assign(grid.blocks.begin(), grid.blocks.end());
    for (size_t id = grid.blocks.size(); id < s.coords.size(); ++id) {
      f_.blocks.push_back(SparseBlock::empty(static_cast<LocalIndex>(grid.plan.span(s.coords[id].row)),
                                             static_cast<LocalIndex>(grid.plan.span(s.coords[id].col))));
    }
    f_.diag.resize(s.p);
  }

  void getrf(Index i, KernelWorkspace& ws) {
    const Index d = tree_.steps()[i].diag;
    f_.diag[i] = factor_diagonal(f_.blocks[d], options_.pivot, ws, i);
    f_.blocks[d] = SparseBlock{};
    if (f_.diag[i].swapped()) any_swap_.store(true);
  }

  void gessm(Index i, Index id, KernelWorkspace& ws) { f_.blocks[id] = factor_u_panel(f_.diag[i], f_.blocks[id], ws); }

  void tstrf(Index i, Index id, KernelWorkspace& ws) { f_.blocks[id] = factor_l_panel(f_.blocks[id], f_.diag[i], ws); }

  void ssssm(Index target, Index lid, Index uid, KernelWorkspace& ws) {
    SparseBlock& t = f_.blocks[target];
    const bool grow = any_swap_.load();
    if (options_.dense_fallback && 2 * t.nnz() >= static_cast<Index>(t.rows) * t.cols) {
      schur_update_dense(t, f_.blocks[lid], f_.blocks[uid], grow);
    } else {
      schur_update(t, f_.blocks[lid], f_.blocks[uid], ws, grow);
    }
  }

  void run_serial() {
    KernelWorkspace ws;
    Index executed = 0;
    for (Index i = 0; i < tree_.p(); ++i) {
      const StepPlan& step = tree_.steps()[i];
      getrf(i, ws);
      for (const BlockRef& u : step.u_panels) gessm(i, u.id, ws);
      for (const BlockRef& l : step.l_panels) tstrf(i, l.id, ws);
      executed += 1 + static_cast<Index>(step.u_panels.size() + step.l_panels.size());
      tree_.for_each_update(i, [&](const BlockRef& l, const BlockRef& u, Index target) {
        ssssm(target, l.id, u.id, ws);
        ++executed;
      });
    }
    f_.stats.tasks_executed = executed;
  }

  void run_parallel(Index workers);

  LUFactors finish() {
    // P_i also reorders the rows of the L blocks left of diagonal block i.
    for (Index id = 0; id < static_cast<Index>(f_.structure.coords.size()); ++id) {
      const auto [bi, bj] = f_.structure.coords[id];
      if (bi <= bj || !f_.diag[bi].swapped()) continue;
      const auto& pinv = f_.diag[bi].pinv;
      SparseBlock& b = f_.blocks[id];
      std::vector<std::pair<LocalIndex, double>> col;
      for (LocalIndex c = 0; c < b.cols; ++c) {
        col.clear();
        for (LocalIndex q = b.col_ptr[c]; q < b.col_ptr[c + 1]; ++q) col.emplace_back(pinv[b.row_idx[q]], b.values[q]);
        std::sort(col.begin(), col.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
        for (size_t e = 0; e < col.size(); ++e) {
          b.row_idx[b.col_ptr[c] + e] = col[e].first;
          b.values[b.col_ptr[c] + e] = col[e].second;
        }
      }
    }
    for (const auto& d : f_.diag) {
      f_.stats.perturbed_pivots += d.perturbed;
      f_.stats.pivoted |= d.swapped();
    }
    return std::move(f_);
  }

 private:
  const DependencyTree& tree_;
  const FactorOptions& options_;
  LUFactors f_;
  std::atomic<bool> any_swap_{false};
};

// Dataflow scheduling. The ready queue and the bookkeeping below are guarded
// by one mutex; block values are only touched by the task that owns them.
class Scheduler {
 public:
  Scheduler(Executor& exec, const DependencyTree& tree) : exec_(exec), tree_(tree), s_(tree.structure()) {
    const size_t blocks = s_.coords.size();
    remaining_ = tree.update_counts();
    panel_done_.assign(blocks, 0);
    diag_done_.assign(s_.p, 0);
    chain_.assign(blocks, Chain{});
    for (Index t = 0; t < static_cast<Index>(blocks); ++t) {
      if (remaining_[t] > 0) advance(t);
    }
    for (Index i = 0; i < s_.p; ++i) {
      if (remaining_[tree.steps()[i].diag] == 0) ready_.push_back({TaskKind::getrf, i, tree.steps()[i].diag, 0, 0});
    }
  }

  Index run(Index workers) {
    std::vector<std::thread> pool;
    for (Index w = 0; w < workers; ++w) pool.emplace_back([this] { work(); });
    for (auto& th : pool) th.join();
    if (error_) std::rethrow_exception(error_);
    return executed_;
  }

 private:
  struct Item {
    TaskKind kind;
    Index step;
    Index target;
    Index lid;
    Index uid;
  };

  // Position of a block's next pending update in the merge of its block row
  // (L panels) and block column (U panels).
  struct Chain {
    size_t rp = 0;
    size_t cp = 0;
    Index step = -1;
    Index lid = -1;
    Index uid = -1;
  };

  void advance(Index t) {
    const auto [k, j] = s_.coords[t];
    const auto& row = s_.by_row[k];
    const auto& col = s_.by_col[j];
    const Index limit = std::min(k, j);
    Chain& c = chain_[t];
    c.step = -1;
    while (c.rp < row.size() && c.cp < col.size()) {
      const Index a = row[c.rp].index, b = col[c.cp].index;
      if (a >= limit || b >= limit) return;
      if (a == b) {
        c.step = a;
        c.lid = row[c.rp].id;
        c.uid = col[c.cp].id;
        return;
      }
      if (a < b) {
        ++c.rp;
      } else {
        ++c.cp;
      }
    }
  }

  void arrive(Index k, Index j, Index i) {
    const Index t = s_.find(k, j);
    const Chain& c = chain_[t];
    if (c.step == i) ready_.push_back({TaskKind::ssssm, i, t, c.lid, c.uid});
  }

  void complete(const Item& item) {
    const auto& steps = tree_.steps();
    switch (item.kind) {
      case TaskKind::getrf: {
        const Index i = item.step;
        diag_done_[i] = 1;
        for (const BlockRef& u : steps[i].u_panels) {
          if (remaining_[u.id] == 0) ready_.push_back({TaskKind::gessm, i, u.id, 0, 0});
        }
        for (const BlockRef& l : steps[i].l_panels) {
          if (remaining_[l.id] == 0) ready_.push_back({TaskKind::tstrf, i, l.id, 0, 0});
        }
        break;
      }
      case TaskKind::gessm: {
        panel_done_[item.target] = 1;
        const Index j = s_.coords[item.target].col;
        for (const BlockRef& l : steps[item.step].l_panels) {
          if (panel_done_[l.id]) arrive(l.index, j, item.step);
        }
        break;
      }
      case TaskKind::tstrf: {
        panel_done_[item.target] = 1;
        const Index k = s_.coords[item.target].row;
        for (const BlockRef& u : steps[item.step].u_panels) {
          if (panel_done_[u.id]) arrive(k, u.index, item.step);
        }
        break;
      }
      case TaskKind::ssssm: {
        const Index t = item.target;
        Chain& c = chain_[t];
        ++c.rp;
        ++c.cp;
        if (--remaining_[t] > 0) {
          advance(t);
          if (panel_done_[c.lid] && panel_done_[c.uid]) ready_.push_back({TaskKind::ssssm, c.step, t, c.lid, c.uid});
          break;
        }
        const auto [k, j] = s_.coords[t];
        if (k == j) {
          ready_.push_back({TaskKind::getrf, k, t, 0, 0});
        } else if (k < j) {
          if (diag_done_[k]) ready_.push_back({TaskKind::gessm, k, t, 0, 0});
        } else if (diag_done_[j]) {
          ready_.push_back({TaskKind::tstrf, j, t, 0, 0});
        }
        break;
      }
    }
  }

  void execute(const Item& item, KernelWorkspace& ws) {
    switch (item.kind) {
      case TaskKind::getrf: exec_.getrf(item.step, ws); break;
      case TaskKind::gessm: exec_.gessm(item.step, item.target, ws); break;
      case TaskKind::tstrf: exec_.tstrf(item.step, item.target, ws); break;
      case TaskKind::ssssm: exec_.ssssm(item.target, item.lid, item.uid, ws); break;
    }
  }

  void work() {
    KernelWorkspace ws;
    const Index total = tree_.task_count();
    std::unique_lock lock(mu_);
    for (;;) {
      cv_.wait(lock, [&] { return !ready_.empty() || executed_ == total || error_; });
      if (error_ || ready_.empty()) return;
      const Item item = ready_.front();
      ready_.pop_front();
      lock.unlock();
      std::exception_ptr failure;
      try {
        execute(item, ws);
      } catch (...) {
        failure = std::current_exception();
      }
      lock.lock();
      if (failure) {
        if (!error_) error_ = failure;
        cv_.notify_all();
        return;
      }
      ++executed_;
      complete(item);
      cv_.notify_all();
    }
  }

  Executor& exec_;
  const DependencyTree& tree_;
  const BlockStructure& s_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Item> ready_;
  std::vector<Index> remaining_;
  std::vector<char> panel_done_;
  std::vector<char> diag_done_;
  std::vector<Chain> chain_;
  Index executed_ = 0;
  std::exception_ptr error_;
};

void Executor::run_parallel(Index workers) {
  Scheduler scheduler(*this, tree_);
  f_.stats.tasks_executed = scheduler.run(workers);
}

}  // namespace

LUFactors factorize(const BlockGrid& grid, const DependencyTree& tree, const FactorOptions& options) {
  if (options.workers < 1) throw Error(ErrorKind::BadParams, "workers must be >= 1");
  if (tree.grid_block_count() != static_cast<Index>(grid.blocks.size()) || tree.p() != grid.p()) {
    throw Error(ErrorKind::DimensionMismatch, "dependency tree was built for a different grid");
  }
  Executor exec(grid, tree, options);
  if (options.workers == 1) {
    exec.run_serial();
  } else {
    exec.run_parallel(options.workers);
  }
  return exec.finish();
}

GlobalFactors assemble(const LUFactors& f) {
  const Index n = f.n();
  const auto& pos = f.plan.positions;
  const auto& s = f.structure;
  GlobalFactors g;
  g.lower.n = g.upper.n = n;
  g.lower.col_ptr.assign(n + 1, 0);
  g.upper.col_ptr.assign(n + 1, 0);
  g.row_perm.resize(n);

  for (Index bj = 0; bj < s.p; ++bj) {
    const DiagonalFactor& d = f.diag[bj];
    for (LocalIndex c = 0; c < static_cast<LocalIndex>(pos[bj + 1] - pos[bj]); ++c) {
      const Index gc = pos[bj] + c;
      g.row_perm[gc] = pos[bj] + d.perm[c];
      for (const BlockRef& r : s.by_col[bj]) {
        if (r.index >= bj) break;
        const SparseBlock& b = f.blocks[r.id];
        for (LocalIndex q = b.col_ptr[c]; q < b.col_ptr[c + 1]; ++q) {
          g.upper.row_idx.push_back(pos[r.index] + b.row_idx[q]);
          g.upper.values.push_back(b.values[q]);
        }
      }
      for (LocalIndex q = d.upper.col_ptr[c]; q < d.upper.col_ptr[c + 1]; ++q) {
        g.upper.row_idx.push_back(pos[bj] + d.upper.row_idx[q]);
        g.upper.values.push_back(d.upper.values[q]);
      }
      g.lower.row_idx.push_back(gc);
      g.lower.values.push_back(1.0);
      for (LocalIndex q = d.lower.col_ptr[c]; q < d.lower.col_ptr[c + 1]; ++q) {
        g.lower.row_idx.push_back(pos[bj] + d.lower.row_idx[q]);
        g.lower.values.push_back(d.lower.values[q]);
      }
      for (const BlockRef& r : s.by_col[bj]) {
        if (r.index <= bj) continue;
        const SparseBlock& b = f.blocks[r.id];
        for (LocalIndex q = b.col_ptr[c]; q < b.col_ptr[c + 1]; ++q) {
          g.lower.row_idx.push_back(pos[r.index] + b.row_idx[q]);
          g.lower.values.push_back(b.values[q]);
        }
      }
      g.upper.col_ptr[gc + 1] = static_cast<Index>(g.upper.row_idx.size());
      g.lower.col_ptr[gc + 1] = static_cast<Index>(g.lower.row_idx.size());
    }
  }
  return g;
}

double residual(const CscMatrix& a, const GlobalFactors& g) {
  if (a.n != g.lower.n) throw Error(ErrorKind::DimensionMismatch, "matrix and factor orders differ");
  const Index n = a.n;
  std::vector<Index> position(n);
  for (Index t = 0; t < n; ++t) position[g.row_perm[t]] = t;

  std::vector<double> acc(n, 0.0);
  std::vector<Index> mark(n, -1);
  std::vector<Index> touched;
  double sum = 0.0;
  for (Index c = 0; c < n; ++c) {
    touched.clear();
    auto touch = [&](Index r) {
      if (mark[r] != c) {
        mark[r] = c;
        acc[r] = 0.0;
        touched.push_back(r);
      }
    };
    for (Index p = g.upper.col_ptr[c]; p < g.upper.col_ptr[c + 1]; ++p) {
      const Index t = g.upper.row_idx[p];
      const double u = g.upper.values[p];
      for (Index q = g.lower.col_ptr[t]; q < g.lower.col_ptr[t + 1]; ++q) {
        touch(g.lower.row_idx[q]);
        acc[g.lower.row_idx[q]] += g.lower.values[q] * u;
      }
    }
    for (Index p = a.col_ptr[c]; p < a.col_ptr[c + 1]; ++p) {
      const Index r = position[a.row_idx[p]];
      touch(r);
      acc[r] -= a.values[p];
    }
    for (Index r : touched) sum += acc[r] * acc[r];
  }
  const double norm = frobenius_norm(a);
  return norm == 0.0 ? std::sqrt(sum) : std::sqrt(sum) / norm;
}

double residual(const CscMatrix& a, const LUFactors& f) {
  if (a.n != f.n()) throw Error(ErrorKind::DimensionMismatch, "matrix and factor orders differ");
  return residual(a, assemble(f));
}

std::vector<double> solve(const GlobalFactors& g, std::span<const double> b) {
  const Index n = g.lower.n;
  if (static_cast<Index>(b.size()) != n) throw Error(ErrorKind::DimensionMismatch, "right-hand side length != order");
  std::vector<double> x(n);
  for (Index t = 0; t < n; ++t) x[t] = b[g.row_perm[t]];
  for (Index c = 0; c < n; ++c) {
    for (Index q = g.lower.col_ptr[c]; q < g.lower.col_ptr[c + 1]; ++q) {
      if (g.lower.row_idx[q] > c) x[g.lower.row_idx[q]] -= g.lower.values[q] * x[c];
    }
  }
  for (Index c = n - 1; c >= 0; --c) {
    const Index last = g.upper.col_ptr[c + 1] - 1;
    if (last < g.upper.col_ptr[c] || g.upper.row_idx[last] != c) {
      throw Error(ErrorKind::ZeroPivot, "missing U diagonal at column " + std::to_string(c));
    }
    x[c] /= g.upper.values[last];
    for (Index q = g.upper.col_ptr[c]; q < last; ++q) x[g.upper.row_idx[q]] -= g.upper.values[q] * x[c];
  }
  return x;
}

std::vector<double> solve(const LUFactors& f, std::span<const double> b) { return solve(assemble(f), b); }

double manufactured_solve_error(const CscMatrix& a, const LUFactors& f) {
  std::vector<double> x_true(a.n);
  for (Index i = 0; i < a.n; ++i) x_true[i] = 1.0 + static_cast<double>(i) / static_cast<double>(a.n);
  const auto x = solve(f, multiply(a, x_true));
  double err = 0.0, scale = 0.0;
  for (Index i = 0; i < a.n; ++i) {
    err = std::max(err, std::abs(x[i] - x_true[i]));
    scale = std::max(scale, std::abs(x_true[i]));
  }
  return err / scale;
}

}  // namespace lublock
