#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "lublock/matrix_io.hpp"

namespace lublock {

namespace {

// mt19937_64 is fully specified by the standard; the distributions are not,
// so doubles are built from the raw bits to stay bit-identical across
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double symmetric() { return 2.0 * uniform() - 1.0; }

 private:
  std::mt19937_64 engine_;
};

// Adds a diagonal that dominates both the row and the column sums.
CscMatrix with_dominant_diagonal(Index n, std::vector<Triplet> off, Rng& rng) {
  std::vector<double> row_sum(n, 0.0), col_sum(n, 0.0);
  for (const auto& t : off) {
    row_sum[t.row] += std::abs(t.value);
    col_sum[t.col] += std::abs(t.value);
  }
  for (Index i = 0; i < n; ++i) off.push_back({i, i, std::max(row_sum[i], col_sum[i]) + 1.0 + rng.uniform()});
  return csc_from_triplets(n, off);
}

}  // namespace

GeneratorKind parse_generator_kind(std::string_view name) {
  if (name == "tridiagonal") return GeneratorKind::tridiagonal;
  if (name == "dense") return GeneratorKind::dense;
  if (name == "arrowhead") return GeneratorKind::arrowhead;
  if (name == "random_spd") return GeneratorKind::random_spd;
  throw Error(ErrorKind::BadParams, "unknown generator '" + std::string(name) + "'");
}

std::string_view to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::tridiagonal: return "tridiagonal";
    case GeneratorKind::dense: return "dense";
    case GeneratorKind::arrowhead: return "arrowhead";
    case GeneratorKind::random_spd: return "random_spd";
  }
  return "unknown";
}

CscMatrix generate(GeneratorKind kind, Index n, const GeneratorParams& params) {
  if (n < 1) throw Error(ErrorKind::BadParams, "generator order must be >= 1");
  Rng rng(params.seed);
  std::vector<Triplet> off;

  switch (kind) {
    case GeneratorKind::tridiagonal:
      for (Index i = 0; i + 1 < n; ++i) {
        off.push_back({i + 1, i, rng.symmetric()});
        off.push_back({i, i + 1, rng.symmetric()});
      }
      break;

    case GeneratorKind::dense:
      for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
          if (i != j) off.push_back({i, j, rng.symmetric()});
        }
      }
      break;

    case GeneratorKind::arrowhead: {
      const Index b = params.border;
      if (b < 0 || b >= n) throw Error(ErrorKind::BadParams, "arrowhead border must satisfy 0 <= b < n");
      const Index first = n - b;
      for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
          if (i != j && (i >= first || j >= first)) off.push_back({i, j, rng.symmetric()});
        }
      }
      break;
    }

    case GeneratorKind::random_spd: {
      const Index w = params.bandwidth > 0 ? params.bandwidth : std::max<Index>(2, n / 50);
      if (params.density <= 0.0 || params.density > 1.0) {
        throw Error(ErrorKind::BadParams, "random_spd density must lie in (0, 1]");
      }
      for (Index j = 0; j < n; ++j) {
        for (Index i = j + 1; i <= std::min(n - 1, j + w); ++i) {
          if (rng.uniform() < params.density) {
            const double v = rng.symmetric();
            off.push_back({i, j, v});
            off.push_back({j, i, v});
          }
        }
      }
      break;
    }
  }
  return with_dominant_diagonal(n, std::move(off), rng);
}

}  // namespace lublock
