#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "lublock/features.hpp"

namespace lublock {

enum class Strategy { regular, irregular };

std::string_view to_string(Strategy s);

struct IrregularOptions {
  Index step = 2;
  Index max_num = 3;
  /// nullopt selects the linear-difference threshold step / sample_points.
  std::optional<double> threshold;
  /// Advance one sample at a time over overlapping windows instead of by step.
  bool overlapping_windows = false;
};

/// Split positions of a 2D block grid; block b spans [positions[b], positions[b+1]).
struct BlockingPlan {
  Index n = 0;
  Strategy strategy = Strategy::regular;
  std::vector<Index> positions;

  // regular
  Index block_size = 0;
  // irregular
  Index sample_points = 0;
  Index step = 0;
  Index max_num = 0;
  double threshold = 0.0;
  bool overlapping_windows = false;

  Index block_count() const { return static_cast<Index>(positions.size()) - 1; }
  Index span(Index b) const { return positions[b + 1] - positions[b]; }
  Index min_span() const;
  Index max_span() const;

  /// Block containing row/col index `i`.
  Index block_of(Index i) const;

  /// Throws BadParams unless positions start at 0, end at n and strictly increase.
  void validate() const;
};

/// Differences within this distance of the threshold count as ties.
inline constexpr double kThresholdTieTolerance = 1e-12;

/// `options.step` is clamped to the curve's sample count.
BlockingPlan irregular_plan(const PercentCurve& curve, const IrregularOptions& options = {});

BlockingPlan regular_plan(Index n, Index block_size);

inline constexpr Index kCandidateBlockSizes[] = {200, 300, 500, 1000, 2000, 5000};

/// Fixed-size selection from the candidate sizes. The smallest candidate of
/// at least n/10 is chosen (5000 if none); very sparse filled patterns
/// (density < 1e-4) step down one size. Callers clamp the result to n.
Index pangulu_size_select(Index n, Index nnz_filled);

}  // namespace lublock
