#pragma once

#include <span>
#include <vector>

#include "lublock/error.hpp"

namespace lublock {

struct Triplet {
  Index row = 0;
  Index col = 0;
  double value = 0.0;

  friend bool operator==(const Triplet&, const Triplet&) = default;
};

/// Square sparse matrix in compressed sparse column form.
///
/// Row indices are sorted and unique within each column. Explicit zeros are
/// legitimate pattern members: symbolic analysis is driven by the pattern.
struct CscMatrix {
  Index n = 0;
  std::vector<Index> col_ptr{0};
  std::vector<Index> row_idx;
  std::vector<double> values;

  Index nnz() const { return col_ptr.empty() ? 0 : col_ptr.back(); }

  std::span<const Index> rows_of(Index col) const {
    return {row_idx.data() + col_ptr[col], static_cast<size_t>(col_ptr[col + 1] - col_ptr[col])};
  }
  std::span<const double> values_of(Index col) const {
    return {values.data() + col_ptr[col], static_cast<size_t>(col_ptr[col + 1] - col_ptr[col])};
  }

  /// Value at (row, col), or 0.0 if the position is not stored.
  double at(Index row, Index col) const;
  bool contains(Index row, Index col) const;

  /// Throws MalformedEntry when any CSC invariant is broken.
  void validate() const;

  friend bool operator==(const CscMatrix&, const CscMatrix&) = default;
};

/// Sorted, duplicate-summed CSC. Duplicates that cancel stay as explicit zeros.
CscMatrix csc_from_triplets(Index n, std::span<const Triplet> entries);

/// Entries in column-major order.
std::vector<Triplet> to_triplets(const CscMatrix& a);

CscMatrix transpose(const CscMatrix& a);

/// Max absolute stored value.
double max_abs(const CscMatrix& a);
double frobenius_norm(const CscMatrix& a);
/// Max absolute row sum.
double inf_norm(const CscMatrix& a);

/// y = A x.
std::vector<double> multiply(const CscMatrix& a, std::span<const double> x);

}  // namespace lublock
