#include "lublock/csc_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace lublock {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonSquare: return "NonSquare";
    case ErrorKind::UnsupportedField: return "UnsupportedField";
    case ErrorKind::MalformedEntry: return "MalformedEntry";
    case ErrorKind::EmptyMatrix: return "EmptyMatrix";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::BadParams: return "BadParams";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::MissingDiagonal: return "MissingDiagonal";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DegenerateMatrix: return "DegenerateMatrix";
    case ErrorKind::DegenerateCurve: return "DegenerateCurve";
    case ErrorKind::ZeroPivot: return "ZeroPivot";
    case ErrorKind::SupportViolation: return "SupportViolation";
  }
  return "Unknown";
}

double CscMatrix::at(Index row, Index col) const {
  auto rows = rows_of(col);
  auto it = std::lower_bound(rows.begin(), rows.end(), row);
  if (it == rows.end() || *it != row) return 0.0;
  return values[col_ptr[col] + (it - rows.begin())];
}

bool CscMatrix::contains(Index row, Index col) const {
  auto rows = rows_of(col);
  return std::binary_search(rows.begin(), rows.end(), row);
}

void CscMatrix::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::MalformedEntry, msg); };
  if (n < 0) fail("negative order");
  if (col_ptr.size() != static_cast<size_t>(n + 1)) fail("col_ptr length != n+1");
  if (col_ptr[0] != 0) fail("col_ptr[0] != 0");
  for (Index j = 0; j < n; ++j) {
    if (col_ptr[j + 1] < col_ptr[j]) fail("col_ptr decreasing at column " + std::to_string(j));
  }
  if (row_idx.size() != static_cast<size_t>(col_ptr[n]) || values.size() != row_idx.size()) {
    fail("array lengths disagree with col_ptr[n]");
  }
  for (Index j = 0; j < n; ++j) {
    for (Index p = col_ptr[j]; p < col_ptr[j + 1]; ++p) {
      if (row_idx[p] < 0 || row_idx[p] >= n) fail("row index out of range in column " + std::to_string(j));
      if (p > col_ptr[j] && row_idx[p] <= row_idx[p - 1]) {
        fail("unsorted or duplicate row index in column " + std::to_string(j));
      }
    }
  }
}

CscMatrix csc_from_triplets(Index n, std::span<const Triplet> entries) {
  if (n < 0) throw Error(ErrorKind::BadParams, "negative order");
  for (const auto& t : entries) {
    if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n) {
      throw Error(ErrorKind::IndexOutOfRange, "entry (" + std::to_string(t.row) + "," +
                                                  std::to_string(t.col) + ") outside order " +
                                                  std::to_string(n));
    }
  }

  // Counting sort by column, then stable sort by row within each column so
  // duplicates are summed in input order.
  std::vector<Index> count(n + 1, 0);
  for (const auto& t : entries) ++count[t.col + 1];
  std::partial_sum(count.begin(), count.end(), count.begin());
  std::vector<size_t> order(entries.size());
  {
    std::vector<Index> next(count.begin(), count.end() - 1);
    for (size_t e = 0; e < entries.size(); ++e) order[next[entries[e].col]++] = e;
  }

  CscMatrix a;
  a.n = n;
  a.col_ptr.assign(n + 1, 0);
  a.row_idx.reserve(entries.size());
  a.values.reserve(entries.size());
  for (Index j = 0; j < n; ++j) {
    auto first = order.begin() + count[j];
    auto last = order.begin() + count[j + 1];
    std::stable_sort(first, last, [&](size_t x, size_t y) { return entries[x].row < entries[y].row; });
    for (auto it = first; it != last; ++it) {
      const auto& t = entries[*it];
      if (static_cast<Index>(a.row_idx.size()) > a.col_ptr[j] && a.row_idx.back() == t.row) {
        a.values.back() += t.value;
      } else {
        a.row_idx.push_back(t.row);
        a.values.push_back(t.value);
      }
    }
    a.col_ptr[j + 1] = static_cast<Index>(a.row_idx.size());
  }
  return a;
}

std::vector<Triplet> to_triplets(const CscMatrix& a) {
  std::vector<Triplet> out;
  out.reserve(a.nnz());
  for (Index j = 0; j < a.n; ++j) {
    for (Index p = a.col_ptr[j]; p < a.col_ptr[j + 1]; ++p) out.push_back({a.row_idx[p], j, a.values[p]});
  }
  return out;
}

CscMatrix transpose(const CscMatrix& a) {
  CscMatrix t;
  t.n = a.n;
  t.col_ptr.assign(a.n + 1, 0);
  for (Index r : a.row_idx) ++t.col_ptr[r + 1];
  std::partial_sum(t.col_ptr.begin(), t.col_ptr.end(), t.col_ptr.begin());
  t.row_idx.resize(a.nnz());
  t.values.resize(a.nnz());
  std::vector<Index> next(t.col_ptr.begin(), t.col_ptr.end() - 1);
  for (Index j = 0; j < a.n; ++j) {
    for (Index p = a.col_ptr[j]; p < a.col_ptr[j + 1]; ++p) {
      Index q = next[a.row_idx[p]]++;
      t.row_idx[q] = j;
      t.values[q] = a.values[p];
    }
  }
  return t;
}

double max_abs(const CscMatrix& a) {
  double m = 0.0;
  for (double v : a.values) m = std::max(m, std::abs(v));
  return m;
}

double frobenius_norm(const CscMatrix& a) {
  double s = 0.0;
  for (double v : a.values) s += v * v;
  return std::sqrt(s);
}

double inf_norm(const CscMatrix& a) {
  std::vector<double> row_sum(a.n, 0.0);
  for (Index p = 0; p < a.nnz(); ++p) row_sum[a.row_idx[p]] += std::abs(a.values[p]);
  double m = 0.0;
  for (double s : row_sum) m = std::max(m, s);
  return m;
}

std::vector<double> multiply(const CscMatrix& a, std::span<const double> x) {
  if (static_cast<Index>(x.size()) != a.n) throw Error(ErrorKind::DimensionMismatch, "vector length != order");
  std::vector<double> y(a.n, 0.0);
  for (Index j = 0; j < a.n; ++j) {
    for (Index p = a.col_ptr[j]; p < a.col_ptr[j + 1]; ++p) y[a.row_idx[p]] += a.values[p] * x[j];
  }
  return y;
}

}  // namespace lublock
