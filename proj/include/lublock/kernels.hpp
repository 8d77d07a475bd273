#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lublock/grid.hpp"

namespace lublock {

struct PivotOptions {
  /// A pivot is accepted when |pivot| >= pivot_tol * max |original column entry|.
  double pivot_tol = 1e-12;
  /// Absolute value substituted for rejected pivots; nullopt raises ZeroPivot.
  std::optional<double> static_pivot;
};

/// perm * B = L * U for one diagonal block. `lower` is strictly lower
/// triangular (unit diagonal implied), `upper` holds the diagonal. Both use
/// pivot-position row indices; perm[t] is the original local row at position t.
struct DiagonalFactor {
  SparseBlock lower;
  SparseBlock upper;
  std::vector<LocalIndex> perm;
  std::vector<LocalIndex> pinv;
  Index perturbed = 0;

  bool swapped() const;
};

/// Dense scratch reused across kernel calls; one per worker.
class KernelWorkspace {
 public:
  void reserve(LocalIndex size);

  std::vector<double> x;
  std::vector<Index> mark;
  std::vector<Index> queued;
  std::vector<LocalIndex> slot;
  std::vector<LocalIndex> touched;
  std::vector<LocalIndex> heap;
  Index stamp = 0;
};

/// Left-looking sparse LU with partial pivoting confined to the block. Each
/// entry receives its updates in ascending pivot order, the same sequence as
/// dense right-looking elimination. Throws ZeroPivotError (tagged with
/// `block_index`) unless a static pivot is configured.
DiagonalFactor factor_diagonal(const SparseBlock& b, const PivotOptions& options, KernelWorkspace& ws,
                               Index block_index = 0);

/// U_ij = L_ii^{-1} * perm_i * B_ij, column by column.
SparseBlock factor_u_panel(const DiagonalFactor& diag, const SparseBlock& b, KernelWorkspace& ws);

/// L_ji = B_ji * U_ii^{-1}, column by column.
SparseBlock factor_l_panel(const SparseBlock& b, const DiagonalFactor& diag, KernelWorkspace& ws);

/// target -= L_ki * U_ij, accumulated in ascending inner index per entry.
/// Products landing outside the target pattern grow it when `allow_growth`,
/// otherwise throw SupportViolation.
void schur_update(SparseBlock& target, const SparseBlock& l, const SparseBlock& u, KernelWorkspace& ws,
                  bool allow_growth = false);

/// Same contract as schur_update on a dense copy of the target.
void schur_update_dense(SparseBlock& target, const SparseBlock& l, const SparseBlock& u, bool allow_growth = false);

}  // namespace lublock
