#include "lublock/blocking.hpp"

#include <algorithm>
#include <string>

namespace lublock {

std::string_view to_string(Strategy s) { return s == Strategy::regular ? "regular" : "irregular"; }

Index BlockingPlan::min_span() const {
  Index m = n;
  for (Index b = 0; b < block_count(); ++b) m = std::min(m, span(b));
  return m;
}

Index BlockingPlan::max_span() const {
  Index m = 0;
  for (Index b = 0; b < block_count(); ++b) m = std::max(m, span(b));
  return m;
}

Index BlockingPlan::block_of(Index i) const {
  auto it = std::upper_bound(positions.begin(), positions.end(), i);
  return static_cast<Index>(it - positions.begin()) - 1;
}

void BlockingPlan::validate() const {
  if (n < 1 || positions.size() < 2) throw Error(ErrorKind::BadParams, "plan needs at least one block");
  if (positions.front() != 0 || positions.back() != n) {
    throw Error(ErrorKind::BadParams, "plan positions must start at 0 and end at n");
  }
  for (size_t b = 1; b < positions.size(); ++b) {
    if (positions[b] <= positions[b - 1]) throw Error(ErrorKind::BadParams, "plan positions must strictly increase");
  }
}

BlockingPlan irregular_plan(const PercentCurve& curve, const IrregularOptions& options) {
  validate_curve(curve);
  const Index sp = curve.sample_points;
  const Index n = curve.n;
  if (options.step < 1) throw Error(ErrorKind::BadParams, "step must be >= 1");
  if (options.max_num < 1) throw Error(ErrorKind::BadParams, "max_num must be >= 1");
  // Curves of tiny matrices have fewer samples than a window.
  const Index step = std::min(options.step, sp);
  const double threshold = options.threshold.value_or(static_cast<double>(step) / static_cast<double>(sp));
  if (!(threshold > 0.0 && threshold <= 1.0)) throw Error(ErrorKind::BadParams, "threshold must lie in (0, 1]");

  BlockingPlan plan;
  plan.n = n;
  plan.strategy = Strategy::irregular;
  plan.sample_points = sp;
  plan.step = step;
  plan.max_num = options.max_num;
  plan.threshold = threshold;
  plan.overlapping_windows = options.overlapping_windows;
  plan.positions.push_back(0);

  auto emit = [&](Index sample) {
    const Index pos = std::min(n, round_ratio(std::min(sample, sp) * n, sp));
    if (pos > plan.positions.back()) plan.positions.push_back(pos);
  };

  const Index advance = options.overlapping_windows ? 1 : step;
  Index skipped = 0;
  for (Index i = 0; i < sp; i += advance) {
    const Index ahead = std::min(i + step, sp);
    if (curve.pct[ahead] - curve.pct[i] >= threshold - kThresholdTieTolerance) {
      emit(i + step);  // dense region
      skipped = 0;
    } else if (skipped >= options.max_num) {
      emit(i + step);  // avoid too large blocks
      skipped = 0;
    } else {
      ++skipped;
    }
  }
  if (plan.positions.back() != n) plan.positions.push_back(n);
  return plan;
}

BlockingPlan regular_plan(Index n, Index block_size) {
  if (n < 1 || block_size < 1 || block_size > n) {
    throw Error(ErrorKind::BadParams, "block size must satisfy 1 <= block_size <= n");
  }
  BlockingPlan plan;
  plan.n = n;
  plan.strategy = Strategy::regular;
  plan.block_size = block_size;
  for (Index p = 0; p < n; p += block_size) plan.positions.push_back(p);
  plan.positions.push_back(n);
  return plan;
}

Index pangulu_size_select(Index n, Index nnz_filled) {
  constexpr size_t kCount = std::size(kCandidateBlockSizes);
  size_t pick = kCount - 1;
  for (size_t s = 0; s < kCount; ++s) {
    if (kCandidateBlockSizes[s] * 10 >= n) {
      pick = s;
      break;
    }
  }
  const double density = static_cast<double>(nnz_filled) / (static_cast<double>(n) * static_cast<double>(n));
  if (density < 1e-4 && pick > 0) --pick;
  return kCandidateBlockSizes[pick];
}

}  // namespace lublock
