#include "lublock/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

namespace lublock {

BlockNnzStats block_nnz_stats(const BlockGrid& grid) {
  BlockNnzStats st;
  double sum = 0.0, sum_sq = 0.0;
  st.min = -1;
  for (const auto& b : grid.blocks) {
    const Index z = b.nnz();
    if (z == 0) continue;
    ++st.blocks;
    st.min = st.min < 0 ? z : std::min(st.min, z);
    st.max = std::max(st.max, z);
    sum += static_cast<double>(z);
  }
  if (st.blocks == 0) {
    st.min = 0;
    return st;
  }
  st.mean = sum / static_cast<double>(st.blocks);
  for (const auto& b : grid.blocks) {
    if (b.nnz() == 0) continue;
    const double d = static_cast<double>(b.nnz()) - st.mean;
    sum_sq += d * d;
  }
  st.cv = std::sqrt(sum_sq / static_cast<double>(st.blocks)) / st.mean;
  return st;
}

const char* to_string(CostModel c) { return c == CostModel::nnz ? "nnz" : "flops"; }

double task_cost(const Task& t, CostModel model) {
  return model == CostModel::nnz ? static_cast<double>(t.nnz_weight) : t.flops;
}

BalanceReport level_work_stats(const DependencyTree& tree, CostModel cost) {
  BalanceReport r;
  r.block_count = tree.p();
  const auto& levels = tree.levels();
  r.per_level_work.reserve(levels.size());
  for (size_t l = 0; l < levels.size(); ++l) {
    const auto& s = levels[l];
    LevelWork w;
    w.level = static_cast<Index>(l);
    w.tasks = s.tasks;
    w.total = cost == CostModel::nnz ? static_cast<double>(s.nnz_total) : s.flops_total;
    w.max_task = cost == CostModel::nnz ? static_cast<double>(s.nnz_max) : s.flops_max;
    r.per_level_work.push_back(w);
    r.total_work += w.total;
  }
  const auto& steps = tree.step_stats();
  for (const auto& s : steps) r.step_levels += s.tasks > 0 ? 1 : 0;
  if (!steps.empty() && r.total_work > 0.0) {
    const auto& last = steps.back();
    r.last_level_share = (cost == CostModel::nnz ? static_cast<double>(last.nnz_total) : last.flops_total) / r.total_work;
  }
  return r;
}

BalanceReport balance_report(const BlockGrid& grid, const DependencyTree& tree, CostModel cost) {
  BalanceReport r = level_work_stats(tree, cost);
  r.per_block_nnz = block_nnz_stats(grid);
  return r;
}

void TaskGraph::add(double c, std::span<const Index> p) {
  cost.push_back(c);
  for (Index q : p) {
    if (q >= 0) preds.push_back(q);
  }
  pred_ptr.push_back(static_cast<Index>(preds.size()));
}

TaskGraph task_graph(const DependencyTree& tree, const std::function<double(const Task&)>& cost) {
  const auto& s = tree.structure();
  TaskGraph g;
  g.cost.reserve(tree.task_count());
  g.pred_ptr.reserve(tree.task_count() + 1);
  std::vector<Index> last(s.coords.size(), -1);  // latest task writing each block
  std::vector<Index> getrf(tree.p(), -1);
  tree.for_each_task([&](const Task& t) {
    const Index me = g.size();
    switch (t.kind) {
      case TaskKind::getrf: {
        const Index p[] = {last[t.target]};
        g.add(cost(t), p);
        getrf[t.step] = me;
        break;
      }
      case TaskKind::gessm:
      case TaskKind::tstrf: {
        const Index p[] = {getrf[t.step], last[t.target]};
        g.add(cost(t), p);
        break;
      }
      case TaskKind::ssssm: {
        const Index p[] = {last[s.find(t.row, t.step)], last[s.find(t.step, t.col)], last[t.target]};
        g.add(cost(t), p);
        break;
      }
    }
    last[t.target] = me;
  });
  return g;
}

TaskGraph task_graph(const DependencyTree& tree, CostModel cost) {
  return task_graph(tree, [cost](const Task& t) { return task_cost(t, cost); });
}

double total_cost(const TaskGraph& g) {
  double s = 0.0;
  for (double c : g.cost) s += c;
  return s;
}

double critical_path(const TaskGraph& g) {
  std::vector<double> finish(g.size(), 0.0);
  double best = 0.0;
  for (Index t = 0; t < g.size(); ++t) {
    double start = 0.0;
    for (Index q = g.pred_ptr[t]; q < g.pred_ptr[t + 1]; ++q) start = std::max(start, finish[g.preds[q]]);
    finish[t] = start + g.cost[t];
    best = std::max(best, finish[t]);
  }
  return best;
}

double makespan(const TaskGraph& g, Index workers) {
  if (workers < 1) throw Error(ErrorKind::BadParams, "workers must be >= 1");
  const Index n = g.size();
  std::vector<Index> indegree(n, 0), succ_ptr(n + 1, 0), succ(g.preds.size());
  for (Index t = 0; t < n; ++t) {
    indegree[t] = g.pred_ptr[t + 1] - g.pred_ptr[t];
    for (Index q = g.pred_ptr[t]; q < g.pred_ptr[t + 1]; ++q) ++succ_ptr[g.preds[q] + 1];
  }
  for (Index t = 0; t < n; ++t) succ_ptr[t + 1] += succ_ptr[t];
  {
    std::vector<Index> next(succ_ptr.begin(), succ_ptr.end() - 1);
    for (Index t = 0; t < n; ++t) {
      for (Index q = g.pred_ptr[t]; q < g.pred_ptr[t + 1]; ++q) succ[next[g.preds[q]]++] = t;
    }
  }

  auto larger_first = [&](Index a, Index b) { return g.cost[a] != g.cost[b] ? g.cost[a] < g.cost[b] : a > b; };
  std::priority_queue<Index, std::vector<Index>, decltype(larger_first)> ready(larger_first);
  using Event = std::pair<double, Index>;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> running;
  for (Index t = 0; t < n; ++t) {
    if (indegree[t] == 0) ready.push(t);
  }

  double now = 0.0;
  Index idle = workers;
  while (!ready.empty() || !running.empty()) {
    while (idle > 0 && !ready.empty()) {
      const Index t = ready.top();
      ready.pop();
      running.emplace(now + g.cost[t], t);
      --idle;
    }
    now = running.top().first;
    while (!running.empty() && running.top().first == now) {
      const Index t = running.top().second;
      running.pop();
      ++idle;
      for (Index q = succ_ptr[t]; q < succ_ptr[t + 1]; ++q) {
        if (--indegree[succ[q]] == 0) ready.push(succ[q]);
      }
    }
  }
  return now;
}

double makespan_model(const DependencyTree& tree, Index workers, CostModel cost) {
  return makespan(task_graph(tree, cost), workers);
}

}  // namespace lublock
