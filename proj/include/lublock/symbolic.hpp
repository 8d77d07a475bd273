#pragma once

#include <span>
#include <vector>

#include "lublock/csc_matrix.hpp"

namespace lublock {

/// Structurally symmetric pattern of L+U after symbolic factorization in
/// natural order. Always has a full diagonal.
struct FilledPattern {
  Index n = 0;
  std::vector<Index> col_ptr{0};
  std::vector<Index> row_idx;

  Index nnz_filled() const { return col_ptr.empty() ? 0 : col_ptr.back(); }

  std::span<const Index> rows_of(Index col) const {
    return {row_idx.data() + col_ptr[col], static_cast<size_t>(col_ptr[col + 1] - col_ptr[col])};
  }
  bool contains(Index row, Index col) const;

  friend bool operator==(const FilledPattern&, const FilledPattern&) = default;
};

/// Pattern of A + A^T with the full diagonal added. Positions that only exist
/// in A^T or on the added diagonal carry 0.0; stored values of A are kept.
CscMatrix symmetrize_pattern(const CscMatrix& a);

/// parent[j] of the elimination tree of a symmetric pattern, -1 for roots.
std::vector<Index> elimination_tree(Index n, std::span<const Index> col_ptr, std::span<const Index> row_idx);

/// Fill pattern of symmetric Gaussian elimination in order 0..n-1, computed
/// from row subtrees of the elimination tree in O(nnz(L)).
///
/// Throws NotSymmetric or MissingDiagonal when `a_sym` is not the output of
/// symmetrize_pattern.
FilledPattern symbolic_factorize(const CscMatrix& a_sym);
FilledPattern symbolic_factorize(const FilledPattern& pattern);

/// nnz(L+U) / nnz(symmetrized A).
double fill_ratio(const CscMatrix& a, const FilledPattern& f);

/// Pattern checks shared with the feature extraction.
void require_symmetric_full_diagonal(Index n, std::span<const Index> col_ptr, std::span<const Index> row_idx);

}  // namespace lublock
