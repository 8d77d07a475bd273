#include "lublock/features.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lublock {

std::string_view to_string(StructureClass c) {
  switch (c) {
    case StructureClass::linear: return "linear";
    case StructureClass::quadratic: return "quadratic";
    case StructureClass::jumpy: return "jumpy";
    case StructureClass::mixed: return "mixed";
  }
  return "unknown";
}

Index round_ratio(Index num, Index den) { return (2 * num + den) / (2 * den); }

Index PercentCurve::position(Index k) const { return round_ratio(k * n, sample_points); }

DiagBlockPointer diag_block_pointer(Index n, std::span<const Index> col_ptr, std::span<const Index> row_idx) {
  require_symmetric_full_diagonal(n, col_ptr, row_idx);

  std::vector<Index> num(n, 0);
  for (Index i = 0; i < n; ++i) {
    for (Index j = col_ptr[i]; j < col_ptr[i + 1]; ++j) {
      const Index index = row_idx[j];
      if (index > i) ++num[index];
    }
  }
  DiagBlockPointer ptr;
  ptr.n = n;
  ptr.blockptr.assign(n + 1, 0);
  for (Index i = 0; i < n; ++i) {
    num[i] = 2 * num[i] + 1;
    ptr.blockptr[i + 1] = ptr.blockptr[i] + num[i];
  }
  return ptr;
}

DiagBlockPointer diag_block_pointer(const FilledPattern& f) { return diag_block_pointer(f.n, f.col_ptr, f.row_idx); }

PercentCurve percentage_curve(const DiagBlockPointer& ptr, Index sample_points) {
  if (sample_points < 2) throw Error(ErrorKind::BadParams, "sample_points must be >= 2");
  const Index n = ptr.n;
  if (n < 1 || ptr.blockptr.back() == 0) throw Error(ErrorKind::DegenerateMatrix, "pattern has no entries");

  PercentCurve curve;
  curve.n = n;
  curve.sample_points = std::min(sample_points, n);
  curve.pct.resize(curve.sample_points + 1);
  const double total = static_cast<double>(ptr.blockptr[n]);
  for (Index k = 0; k <= curve.sample_points; ++k) {
    curve.pct[k] = static_cast<double>(ptr.blockptr[curve.position(k)]) / total;
  }
  curve.pct.front() = 0.0;
  curve.pct.back() = 1.0;
  return curve;
}

void validate_curve(const PercentCurve& curve) {
  if (curve.n < 1 || curve.sample_points < 1 || curve.sample_points > curve.n ||
      static_cast<Index>(curve.pct.size()) != curve.sample_points + 1) {
    throw Error(ErrorKind::DegenerateCurve, "curve length does not match sample_points");
  }
  if (curve.pct.front() != 0.0 || curve.pct.back() != 1.0) {
    throw Error(ErrorKind::DegenerateCurve, "curve must run from 0 to 1");
  }
  for (size_t k = 1; k < curve.pct.size(); ++k) {
    if (!(curve.pct[k] >= curve.pct[k - 1])) throw Error(ErrorKind::DegenerateCurve, "curve is not monotone");
  }
}

StructureClass classify_curve(const PercentCurve& curve) {
  constexpr double kShapeTolerance = 0.02;
  constexpr double kJumpFactor = 10.0;

  double linear_dev = 0.0, quadratic_dev = 0.0, max_increment = 0.0;
  for (Index k = 0; k <= curve.sample_points; ++k) {
    const double x = static_cast<double>(curve.position(k)) / static_cast<double>(curve.n);
    linear_dev = std::max(linear_dev, std::abs(curve.pct[k] - x));
    quadratic_dev = std::max(quadratic_dev, std::abs(curve.pct[k] - x * x));
    if (k > 0) max_increment = std::max(max_increment, curve.pct[k] - curve.pct[k - 1]);
  }
  if (linear_dev < kShapeTolerance) return StructureClass::linear;
  if (quadratic_dev < kShapeTolerance) return StructureClass::quadratic;
  const double mean_increment = 1.0 / static_cast<double>(curve.sample_points);
  if (max_increment > kJumpFactor * mean_increment) return StructureClass::jumpy;
  return StructureClass::mixed;
}

}  // namespace lublock
