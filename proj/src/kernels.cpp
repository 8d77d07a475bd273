#include "lublock/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>

namespace lublock {

namespace {

void heap_push(std::vector<LocalIndex>& heap, LocalIndex v) {
  heap.push_back(v);
  std::push_heap(heap.begin(), heap.end(), std::greater<>());
}

LocalIndex heap_pop(std::vector<LocalIndex>& heap) {
  std::pop_heap(heap.begin(), heap.end(), std::greater<>());
  const LocalIndex v = heap.back();
  heap.pop_back();
  return v;
}

using ColumnEntries = std::vector<std::pair<LocalIndex, double>>;

// Merges new (row, value) entries into the columns listed in `grown`.
void grow(SparseBlock& target, const std::vector<std::pair<LocalIndex, ColumnEntries>>& grown) {
  SparseBlock out = SparseBlock::empty(target.rows, target.cols);
  out.row_idx.reserve(target.row_idx.size());
  out.values.reserve(target.values.size());
  size_t g = 0;
  for (LocalIndex c = 0; c < target.cols; ++c) {
    const auto rows = target.rows_of(c);
    const auto vals = target.values_of(c);
    if (g < grown.size() && grown[g].first == c) {
      const auto& extra = grown[g++].second;
      size_t a = 0, e = 0;
      while (a < rows.size() || e < extra.size()) {
        if (e == extra.size() || (a < rows.size() && rows[a] < extra[e].first)) {
          out.row_idx.push_back(rows[a]);
          out.values.push_back(vals[a++]);
        } else {
          out.row_idx.push_back(extra[e].first);
          out.values.push_back(extra[e++].second);
        }
      }
    } else {
      out.row_idx.insert(out.row_idx.end(), rows.begin(), rows.end());
      out.values.insert(out.values.end(), vals.begin(), vals.end());
    }
    out.col_ptr[c + 1] = static_cast<LocalIndex>(out.row_idx.size());
  }
  target = std::move(out);
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorKind::DimensionMismatch, what);
}

}  // namespace

bool DiagonalFactor::swapped() const {
  for (size_t t = 0; t < perm.size(); ++t) {
    if (perm[t] != static_cast<LocalIndex>(t)) return true;
  }
  return false;
}

void KernelWorkspace::reserve(LocalIndex size) {
  if (static_cast<LocalIndex>(x.size()) >= size) return;
  x.resize(size, 0.0);
  mark.resize(size, 0);
  queued.resize(size, 0);
  slot.resize(size, 0);
}

DiagonalFactor factor_diagonal(const SparseBlock& b, const PivotOptions& options, KernelWorkspace& ws,
                               Index block_index) {
  require(b.rows == b.cols, "diagonal block must be square");
  const LocalIndex m = b.rows;
  ws.reserve(m);

  DiagonalFactor f;
  f.perm.assign(m, -1);
  f.pinv.assign(m, -1);
  f.upper = SparseBlock::empty(m, m);
  SparseBlock& up = f.upper;

  // L columns with original row indices; remapped to pivot positions at the end.
  std::vector<LocalIndex> l_ptr{0};
  std::vector<LocalIndex> l_rows;
  std::vector<double> l_vals;

  auto& x = ws.x;
  for (LocalIndex j = 0; j < m; ++j) {
    const Index s = ++ws.stamp;
    ws.touched.clear();
    ws.heap.clear();

    double colmax = 0.0;
    for (LocalIndex q = b.col_ptr[j]; q < b.col_ptr[j + 1]; ++q) {
      const LocalIndex r = b.row_idx[q];
      x[r] = b.values[q];
      ws.mark[r] = s;
      ws.touched.push_back(r);
      colmax = std::max(colmax, std::abs(b.values[q]));
      if (f.pinv[r] >= 0) {
        ws.queued[r] = s;
        heap_push(ws.heap, f.pinv[r]);
      }
    }

    // Sparse triangular solve against the columns of L computed so far.
    while (!ws.heap.empty()) {
      const LocalIndex t = heap_pop(ws.heap);
      const double xt = x[f.perm[t]];
      up.row_idx.push_back(t);
      up.values.push_back(xt);
      for (LocalIndex q = l_ptr[t]; q < l_ptr[t + 1]; ++q) {
        const LocalIndex r = l_rows[q];
        if (ws.mark[r] != s) {
          ws.mark[r] = s;
          x[r] = 0.0;
          ws.touched.push_back(r);
        }
        x[r] -= l_vals[q] * xt;
        if (f.pinv[r] >= 0 && ws.queued[r] != s) {
          ws.queued[r] = s;
          heap_push(ws.heap, f.pinv[r]);
        }
      }
    }

    LocalIndex pivot_row = -1;
    double best = -1.0;
    for (LocalIndex r : ws.touched) {
      if (f.pinv[r] >= 0) continue;
      const double a = std::abs(x[r]);
      if (a > best || (a == best && r < pivot_row)) {
        best = a;
        pivot_row = r;
      }
    }
    if (pivot_row < 0) {
      // Structurally empty candidate set.
      if (!options.static_pivot) throw ZeroPivotError(block_index, j, 0.0);
      for (LocalIndex r = 0; r < m; ++r) {
        if (f.pinv[r] < 0) {
          pivot_row = r;
          break;
        }
      }
      ws.mark[pivot_row] = s;
      x[pivot_row] = 0.0;
      ws.touched.push_back(pivot_row);
    }

    double pivot = x[pivot_row];
    if (pivot == 0.0 || std::abs(pivot) < options.pivot_tol * colmax) {
      if (!options.static_pivot) throw ZeroPivotError(block_index, j, pivot);
      pivot = std::signbit(pivot) ? -*options.static_pivot : *options.static_pivot;
      ++f.perturbed;
    }
    up.row_idx.push_back(j);
    up.values.push_back(pivot);
    up.col_ptr[j + 1] = static_cast<LocalIndex>(up.row_idx.size());

    for (LocalIndex r : ws.touched) {
      if (f.pinv[r] >= 0 || r == pivot_row) continue;
      l_rows.push_back(r);
      l_vals.push_back(x[r] / pivot);
    }
    l_ptr.push_back(static_cast<LocalIndex>(l_rows.size()));
    f.pinv[pivot_row] = j;
    f.perm[j] = pivot_row;
  }

  f.lower = SparseBlock::empty(m, m);
  f.lower.row_idx.reserve(l_rows.size());
  f.lower.values.reserve(l_rows.size());
  ColumnEntries col;
  for (LocalIndex j = 0; j < m; ++j) {
    col.clear();
    for (LocalIndex q = l_ptr[j]; q < l_ptr[j + 1]; ++q) col.emplace_back(f.pinv[l_rows[q]], l_vals[q]);
    std::sort(col.begin(), col.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [r, v] : col) {
      f.lower.row_idx.push_back(r);
      f.lower.values.push_back(v);
    }
    f.lower.col_ptr[j + 1] = static_cast<LocalIndex>(f.lower.row_idx.size());
  }
  return f;
}

SparseBlock factor_u_panel(const DiagonalFactor& diag, const SparseBlock& b, KernelWorkspace& ws) {
  const SparseBlock& lower = diag.lower;
  const LocalIndex m = lower.rows;
  require(b.rows == m, "U panel rows must match the diagonal block");
  ws.reserve(m);
  auto& x = ws.x;

  SparseBlock out = SparseBlock::empty(m, b.cols);
  out.row_idx.reserve(b.row_idx.size());
  out.values.reserve(b.row_idx.size());
  for (LocalIndex c = 0; c < b.cols; ++c) {
    const Index s = ++ws.stamp;
    ws.heap.clear();
    for (LocalIndex q = b.col_ptr[c]; q < b.col_ptr[c + 1]; ++q) {
      const LocalIndex pos = diag.pinv[b.row_idx[q]];
      x[pos] = b.values[q];
      ws.mark[pos] = s;
      heap_push(ws.heap, pos);
    }
    while (!ws.heap.empty()) {
      const LocalIndex t = heap_pop(ws.heap);
      const double xt = x[t];
      out.row_idx.push_back(t);
      out.values.push_back(xt);
      for (LocalIndex q = lower.col_ptr[t]; q < lower.col_ptr[t + 1]; ++q) {
        const LocalIndex r = lower.row_idx[q];
        if (ws.mark[r] != s) {
          ws.mark[r] = s;
          x[r] = 0.0;
          heap_push(ws.heap, r);
        }
        x[r] -= lower.values[q] * xt;
      }
    }
    out.col_ptr[c + 1] = static_cast<LocalIndex>(out.row_idx.size());
  }
  return out;
}

SparseBlock factor_l_panel(const SparseBlock& b, const DiagonalFactor& diag, KernelWorkspace& ws) {
  const SparseBlock& up = diag.upper;
  const LocalIndex m = up.cols;
  require(b.cols == m, "L panel columns must match the diagonal block");
  ws.reserve(b.rows);
  auto& x = ws.x;

  SparseBlock out = SparseBlock::empty(b.rows, m);
  out.row_idx.reserve(b.row_idx.size());
  out.values.reserve(b.row_idx.size());
  for (LocalIndex c = 0; c < m; ++c) {
    const Index s = ++ws.stamp;
    ws.touched.clear();
    for (LocalIndex q = b.col_ptr[c]; q < b.col_ptr[c + 1]; ++q) {
      const LocalIndex r = b.row_idx[q];
      x[r] = b.values[q];
      ws.mark[r] = s;
      ws.touched.push_back(r);
    }
    double pivot = 0.0;
    for (LocalIndex p = up.col_ptr[c]; p < up.col_ptr[c + 1]; ++p) {
      const LocalIndex t = up.row_idx[p];
      if (t == c) {
        pivot = up.values[p];
        continue;
      }
      const double u = up.values[p];
      for (LocalIndex q = out.col_ptr[t]; q < out.col_ptr[t + 1]; ++q) {
        const LocalIndex r = out.row_idx[q];
        if (ws.mark[r] != s) {
          ws.mark[r] = s;
          x[r] = 0.0;
          ws.touched.push_back(r);
        }
        x[r] -= out.values[q] * u;
      }
    }
    if (!ws.touched.empty() && pivot == 0.0) throw ZeroPivotError(-1, c, pivot);
    std::sort(ws.touched.begin(), ws.touched.end());
    for (LocalIndex r : ws.touched) {
      out.row_idx.push_back(r);
      out.values.push_back(x[r] / pivot);
    }
    out.col_ptr[c + 1] = static_cast<LocalIndex>(out.row_idx.size());
  }
  return out;
}

void schur_update(SparseBlock& target, const SparseBlock& l, const SparseBlock& u, KernelWorkspace& ws,
                  bool allow_growth) {
  require(l.rows == target.rows && u.cols == target.cols && l.cols == u.rows, "Schur update dimensions disagree");
  if (l.is_empty() || u.is_empty()) return;
  ws.reserve(target.rows);
  auto& x = ws.x;

  std::vector<std::pair<LocalIndex, ColumnEntries>> grown;
  for (LocalIndex c = 0; c < u.cols; ++c) {
    if (u.col_ptr[c] == u.col_ptr[c + 1]) continue;
    if (target.col_ptr[c + 1] - target.col_ptr[c] == target.rows) {
      // Full column: row r lives at col_ptr[c] + r.
      double* tcol = target.values.data() + target.col_ptr[c];
      for (LocalIndex p = u.col_ptr[c]; p < u.col_ptr[c + 1]; ++p) {
        const LocalIndex t = u.row_idx[p];
        const double uv = u.values[p];
        for (LocalIndex q = l.col_ptr[t]; q < l.col_ptr[t + 1]; ++q) tcol[l.row_idx[q]] -= l.values[q] * uv;
      }
      continue;
    }
    const Index s = ++ws.stamp;
    for (LocalIndex q = target.col_ptr[c]; q < target.col_ptr[c + 1]; ++q) {
      ws.mark[target.row_idx[q]] = s;
      ws.slot[target.row_idx[q]] = q;
    }
    ws.touched.clear();
    for (LocalIndex p = u.col_ptr[c]; p < u.col_ptr[c + 1]; ++p) {
      const LocalIndex t = u.row_idx[p];
      const double uv = u.values[p];
      for (LocalIndex q = l.col_ptr[t]; q < l.col_ptr[t + 1]; ++q) {
        const LocalIndex r = l.row_idx[q];
        if (ws.mark[r] == s) {
          target.values[ws.slot[r]] -= l.values[q] * uv;
        } else {
          if (ws.queued[r] != s) {
            ws.queued[r] = s;
            x[r] = 0.0;
            ws.touched.push_back(r);
          }
          x[r] -= l.values[q] * uv;
        }
      }
    }
    if (!ws.touched.empty()) {
      if (!allow_growth) {
        throw Error(ErrorKind::SupportViolation,
                    "update writes outside the target pattern in local column " + std::to_string(c));
      }
      std::sort(ws.touched.begin(), ws.touched.end());
      ColumnEntries extra;
      for (LocalIndex r : ws.touched) extra.emplace_back(r, x[r]);
      grown.emplace_back(c, std::move(extra));
    }
  }
  if (!grown.empty()) grow(target, grown);
}

void schur_update_dense(SparseBlock& target, const SparseBlock& l, const SparseBlock& u, bool allow_growth) {
  require(l.rows == target.rows && u.cols == target.cols && l.cols == u.rows, "Schur update dimensions disagree");
  if (l.is_empty() || u.is_empty()) return;
  const LocalIndex rows = target.rows;
  const auto ld = l.to_dense();
  const auto ud = u.to_dense();
  auto td = target.to_dense();
  for (LocalIndex c = 0; c < u.cols; ++c) {
    for (LocalIndex t = 0; t < u.rows; ++t) {
      const double uv = ud[static_cast<size_t>(c) * u.rows + t];
      if (uv == 0.0) continue;
      const double* lcol = ld.data() + static_cast<size_t>(t) * rows;
      double* tcol = td.data() + static_cast<size_t>(c) * rows;
      for (LocalIndex r = 0; r < rows; ++r) tcol[r] -= lcol[r] * uv;
    }
  }

  std::vector<std::pair<LocalIndex, ColumnEntries>> grown;
  for (LocalIndex c = 0; c < target.cols; ++c) {
    const double* tcol = td.data() + static_cast<size_t>(c) * rows;
    for (LocalIndex q = target.col_ptr[c]; q < target.col_ptr[c + 1]; ++q) target.values[q] = tcol[target.row_idx[q]];
    ColumnEntries extra;
    LocalIndex q = target.col_ptr[c];
    for (LocalIndex r = 0; r < rows; ++r) {
      if (q < target.col_ptr[c + 1] && target.row_idx[q] == r) {
        ++q;
        continue;
      }
      if (tcol[r] != 0.0) extra.emplace_back(r, tcol[r]);
    }
    if (!extra.empty()) {
      if (!allow_growth) {
        throw Error(ErrorKind::SupportViolation,
                    "update writes outside the target pattern in local column " + std::to_string(c));
      }
      grown.emplace_back(c, std::move(extra));
    }
  }
  if (!grown.empty()) grow(target, grown);
}

}  // namespace lublock
