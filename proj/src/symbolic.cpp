#include "lublock/symbolic.hpp"

#include <algorithm>
#include <string>

namespace lublock {

bool FilledPattern::contains(Index row, Index col) const {
  auto rows = rows_of(col);
  return std::binary_search(rows.begin(), rows.end(), row);
}

void require_symmetric_full_diagonal(Index n, std::span<const Index> col_ptr, std::span<const Index> row_idx) {
  // Counting transpose: column j of the transpose lists rows in ascending
  // order, so it must match column j of the pattern exactly.
  std::vector<Index> count(n + 1, 0);
  for (Index r : row_idx) ++count[r + 1];
  for (Index j = 0; j < n; ++j) count[j + 1] += count[j];
  std::vector<Index> t_rows(row_idx.size());
  std::vector<Index> next(count.begin(), count.end() - 1);
  for (Index j = 0; j < n; ++j) {
    bool has_diag = false;
    for (Index p = col_ptr[j]; p < col_ptr[j + 1]; ++p) {
      t_rows[next[row_idx[p]]++] = j;
      has_diag |= row_idx[p] == j;
    }
    if (!has_diag) throw Error(ErrorKind::MissingDiagonal, "column " + std::to_string(j));
  }
  for (Index j = 0; j < n; ++j) {
    if (count[j + 1] - count[j] != col_ptr[j + 1] - col_ptr[j] ||
        !std::equal(row_idx.begin() + col_ptr[j], row_idx.begin() + col_ptr[j + 1], t_rows.begin() + count[j])) {
      throw Error(ErrorKind::NotSymmetric, "column " + std::to_string(j) + " differs from its transpose");
    }
  }
}

CscMatrix symmetrize_pattern(const CscMatrix& a) {
  std::vector<Triplet> entries = to_triplets(a);
  const size_t original = entries.size();
  for (size_t e = 0; e < original; ++e) {
    const auto t = entries[e];
    if (t.row != t.col && !a.contains(t.col, t.row)) entries.push_back({t.col, t.row, 0.0});
  }
  for (Index i = 0; i < a.n; ++i) {
    if (!a.contains(i, i)) entries.push_back({i, i, 0.0});
  }
  return csc_from_triplets(a.n, entries);
}

std::vector<Index> elimination_tree(Index n, std::span<const Index> col_ptr, std::span<const Index> row_idx) {
  std::vector<Index> parent(n, -1), ancestor(n, -1);
  for (Index j = 0; j < n; ++j) {
    for (Index p = col_ptr[j]; p < col_ptr[j + 1]; ++p) {
      // Walk from i towards the root with path compression.
      for (Index i = row_idx[p]; i != -1 && i < j;) {
        Index next = ancestor[i];
        ancestor[i] = j;
        if (next == -1) {
          parent[i] = j;
          break;
        }
        i = next;
      }
    }
  }
  return parent;
}

namespace {

FilledPattern factorize_pattern(Index n, std::span<const Index> col_ptr, std::span<const Index> row_idx) {
  require_symmetric_full_diagonal(n, col_ptr, row_idx);
  const auto parent = elimination_tree(n, col_ptr, row_idx);

  // Row i of L is the union of etree paths from each k < i in A(i, :) up to i.
  std::vector<std::vector<Index>> lower_cols(n);
  std::vector<std::vector<Index>> lower_rows(n);
  std::vector<Index> mark(n, -1);
  for (Index i = 0; i < n; ++i) {
    mark[i] = i;
    for (Index p = col_ptr[i]; p < col_ptr[i + 1]; ++p) {
      for (Index k = row_idx[p]; k < i && mark[k] != i; k = parent[k]) {
        mark[k] = i;
        lower_cols[k].push_back(i);
        lower_rows[i].push_back(k);
      }
    }
    std::sort(lower_rows[i].begin(), lower_rows[i].end());
  }

  FilledPattern f;
  f.n = n;
  f.col_ptr.assign(n + 1, 0);
  for (Index j = 0; j < n; ++j) {
    f.col_ptr[j + 1] = f.col_ptr[j] + static_cast<Index>(lower_rows[j].size() + 1 + lower_cols[j].size());
  }
  f.row_idx.reserve(f.col_ptr[n]);
  for (Index j = 0; j < n; ++j) {
    f.row_idx.insert(f.row_idx.end(), lower_rows[j].begin(), lower_rows[j].end());
    f.row_idx.push_back(j);
    f.row_idx.insert(f.row_idx.end(), lower_cols[j].begin(), lower_cols[j].end());
  }
  return f;
}

}  // namespace

FilledPattern symbolic_factorize(const CscMatrix& a_sym) { return factorize_pattern(a_sym.n, a_sym.col_ptr, a_sym.row_idx); }

FilledPattern symbolic_factorize(const FilledPattern& pattern) {
  return factorize_pattern(pattern.n, pattern.col_ptr, pattern.row_idx);
}

double fill_ratio(const CscMatrix& a, const FilledPattern& f) {
  if (a.n != f.n) throw Error(ErrorKind::DimensionMismatch, "matrix and pattern orders differ");
  const auto sym = symmetrize_pattern(a);
  if (sym.nnz() == 0) throw Error(ErrorKind::DegenerateMatrix, "empty matrix");
  return static_cast<double>(f.nnz_filled()) / static_cast<double>(sym.nnz());
}

}  // namespace lublock
