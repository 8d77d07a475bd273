#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "lublock/blocking.hpp"
#include "lublock/csc_matrix.hpp"
#include "lublock/features.hpp"

namespace lublock {

/// Reads a coordinate Matrix Market file (real, integer or pattern; general
/// or symmetric). Symmetric storage is mirrored, pattern entries become 1.0
/// and duplicates are summed.
CscMatrix read_matrix_market(const std::filesystem::path& path);
CscMatrix parse_matrix_market(std::istream& in);

void write_matrix_market(const CscMatrix& a, const std::filesystem::path& path);

enum class GeneratorKind { tridiagonal, dense, arrowhead, random_spd };

struct GeneratorParams {
  /// Dense border width (arrowhead).
  Index border = 0;
  /// Half bandwidth of the random pattern; 0 picks max(2, n/50) (random_spd).
  Index bandwidth = 0;
  /// Probability of an off-diagonal position inside the band (random_spd).
  double density = 0.3;
  std::uint64_t seed = 1;
};

GeneratorKind parse_generator_kind(std::string_view name);
std::string_view to_string(GeneratorKind kind);

/// Deterministic, strictly diagonally dominant (by rows and by columns)
/// test matrices. random_spd has symmetric values; the other kinds draw the
/// two mirrored off-diagonal values independently.
CscMatrix generate(GeneratorKind kind, Index n, const GeneratorParams& params = {});

/// `index,fraction` with one row per sample.
void write_curve_csv(const PercentCurve& curve, const std::filesystem::path& path);
void write_curve_csv(const PercentCurve& curve, std::ostream& out);

std::string plan_to_json(const BlockingPlan& plan);
void write_plan_json(const BlockingPlan& plan, const std::filesystem::path& path);
BlockingPlan plan_from_json(std::string_view text);

/// Header row then one comma-separated row per entry. Cells are written as given.
struct Report {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

void write_report_csv(const Report& report, const std::filesystem::path& path);
void write_report_csv(const Report& report, std::ostream& out);

/// Fixed-precision rendering shared by every CSV writer (17 significant digits).
std::string format_real(double v);

}  // namespace lublock
