#pragma once

#include <string_view>
#include <vector>

#include "lublock/symbolic.hpp"

namespace lublock {

/// blockptr[k] is the number of entries of the leading k x k principal
/// submatrix of a symmetric pattern with full diagonal.
struct DiagBlockPointer {
  Index n = 0;
  std::vector<Index> blockptr{0};
};

/// Normalized diagonal-block distribution sampled at sample_points+1 points.
struct PercentCurve {
  Index n = 0;
  Index sample_points = 0;
  std::vector<double> pct;

  /// Matrix row/col index of sample k: round-half-up of k*n/sample_points.
  Index position(Index k) const;
};

enum class StructureClass { linear, quadratic, jumpy, mixed };

std::string_view to_string(StructureClass c);

inline constexpr Index kDefaultSamplePoints = 1000;

/// Diagonal block pointer straight from the CSC arrays: off-diagonal entries
/// below the diagonal are counted per row, then each row contributes twice
/// that count plus its diagonal entry.
DiagBlockPointer diag_block_pointer(const FilledPattern& f);
DiagBlockPointer diag_block_pointer(Index n, std::span<const Index> col_ptr, std::span<const Index> row_idx);

/// sample_points is clamped to n. Throws DegenerateMatrix for an empty pattern.
PercentCurve percentage_curve(const DiagBlockPointer& ptr, Index sample_points = kDefaultSamplePoints);

/// Rounds half up: (2*num + den) / (2*den) for non-negative operands.
Index round_ratio(Index num, Index den);

/// First matching rule wins: linear, quadratic, jumpy, mixed.
StructureClass classify_curve(const PercentCurve& curve);

/// Throws DegenerateCurve if the endpoints, length or monotonicity are off.
void validate_curve(const PercentCurve& curve);

}  // namespace lublock
