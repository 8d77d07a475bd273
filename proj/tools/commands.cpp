#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>

#include "lublock/blocking.hpp"
#include "lublock/factorize.hpp"
#include "lublock/features.hpp"
#include "lublock/grid.hpp"
#include "lublock/matrix_io.hpp"
#include "lublock/metrics.hpp"
#include "lublock/symbolic.hpp"

namespace lublock::cli {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumeric = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BadParams:
      return kExitUsage;
    case ErrorKind::IoError:
    case ErrorKind::MalformedEntry:
    case ErrorKind::UnsupportedField:
    case ErrorKind::NonSquare:
    case ErrorKind::EmptyMatrix:
    case ErrorKind::IndexOutOfRange:
      return kExitIo;
    default:
      return kExitNumeric;
  }
}

struct PlanFlags {
  std::string strategy = "irregular";
  Index block_size = 0;
  Index sample_points = kDefaultSamplePoints;
  Index step = 2;
  Index max_num = 3;
  std::string threshold = "linear";
  bool overlapping = false;
};

struct RunConfig {
  std::vector<std::string> inputs;
  PlanFlags plan;
  Index workers = 1;
  double pivot_tol = 1e-12;
  std::optional<double> static_pivot;
  Index repeats = 3;
  std::uint64_t seed = 1;
  Index model_workers = 4;
  std::string out;
  // generate
  std::string kind;
  Index n = 0;
  Index border = 0;
  Index bandwidth = 0;
  double density = 0.3;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

template <class T>
T parse_number(std::string_view text, const char* what) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw Error(ErrorKind::BadParams, std::string("bad ") + what + " '" + std::string(text) + "'");
  return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  size_t start = 0;
  for (size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

// Matrix sources are Matrix Market paths or gen:<kind>:<n>[:<param>], where
// param is the border (arrowhead) or half bandwidth (random_spd).
CscMatrix load_matrix(const std::string& source, std::uint64_t seed) {
  if (!source.starts_with("gen:")) return read_matrix_market(source);
  const auto parts = split(std::string_view(source).substr(4), ':');
  if (parts.size() < 2 || parts.size() > 3) throw Error(ErrorKind::BadParams, "expected gen:<kind>:<n>[:<param>], got '" + source + "'");
  const GeneratorKind kind = parse_generator_kind(parts[0]);
  const Index n = parse_number<Index>(parts[1], "matrix size");
  GeneratorParams params;
  params.seed = seed;
  if (parts.size() == 3) {
    const Index v = parse_number<Index>(parts[2], "generator parameter");
    if (kind == GeneratorKind::arrowhead) params.border = v;
    else params.bandwidth = v;
  }
  return generate(kind, n, params);
}

std::string matrix_name(const std::string& source) {
  if (source.starts_with("gen:")) return source;
  return std::filesystem::path(source).stem().string();
}

struct Prepared {
  CscMatrix a;
  FilledPattern filled;
  PercentCurve curve;
};

Prepared prepare(CscMatrix a, Index sample_points) {
  Prepared p;
  p.filled = symbolic_factorize(symmetrize_pattern(a));
  p.curve = percentage_curve(diag_block_pointer(p.filled), sample_points);
  p.a = std::move(a);
  return p;
}

IrregularOptions irregular_options(const PlanFlags& flags) {
  IrregularOptions o;
  o.step = flags.step;
  o.max_num = flags.max_num;
  o.overlapping_windows = flags.overlapping;
  if (flags.threshold != "linear") o.threshold = parse_number<double>(flags.threshold, "threshold");
  return o;
}

BlockingPlan make_plan(const Prepared& p, const PlanFlags& flags) {
  if (flags.sample_points < 2) throw Error(ErrorKind::BadParams, "--sample-points must be >= 2");
  if (flags.strategy == "irregular") return irregular_plan(p.curve, irregular_options(flags));
  if (flags.strategy == "regular") {
    Index bs = flags.block_size;
    if (bs == 0) bs = std::min(p.a.n, pangulu_size_select(p.a.n, p.filled.nnz_filled()));
    return regular_plan(p.a.n, bs);
  }
  throw Error(ErrorKind::BadParams, "unknown strategy '" + flags.strategy + "'");
}

FactorOptions factor_options(const RunConfig& cfg, const CscMatrix* a = nullptr) {
  if (cfg.workers < 1) throw Error(ErrorKind::BadParams, "--workers must be >= 1");
  if (cfg.repeats < 1) throw Error(ErrorKind::BadParams, "--repeats must be >= 1");
  FactorOptions o;
  o.workers = cfg.workers;
  o.pivot.pivot_tol = cfg.pivot_tol;
  if (cfg.static_pivot) {
    if (*cfg.static_pivot <= 0.0) throw Error(ErrorKind::BadParams, "--static-pivot must be positive");
    if (a) o.pivot.static_pivot = *cfg.static_pivot * max_abs(*a);
  }
  return o;
}

std::string csv_safe(std::string s) {
  for (char& c : s) {
    if (c == ',') c = ';';
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

int cmd_analyze(const RunConfig& cfg, std::ostream& out) {
  const Prepared p = prepare(load_matrix(cfg.inputs.at(0), cfg.seed), cfg.plan.sample_points);
  if (!cfg.out.empty()) write_curve_csv(p.curve, cfg.out);
  out << "n: " << p.a.n << '\n'
      << "nnz(A): " << p.a.nnz() << '\n'
      << "nnz(L+U): " << p.filled.nnz_filled() << '\n'
      << "fill_ratio: " << format_real(fill_ratio(p.a, p.filled)) << '\n'
      << "class: " << to_string(classify_curve(p.curve)) << '\n';
  return kExitOk;
}

int cmd_plan(const RunConfig& cfg, std::ostream& out) {
  const Prepared p = prepare(load_matrix(cfg.inputs.at(0), cfg.seed), cfg.plan.sample_points);
  const BlockingPlan plan = make_plan(p, cfg.plan);
  if (!cfg.out.empty()) write_plan_json(plan, cfg.out);
  out << "strategy: " << to_string(plan.strategy) << '\n'
      << "blocks: " << plan.block_count() << '\n'
      << "min_span: " << plan.min_span() << '\n'
      << "max_span: " << plan.max_span() << '\n';
  return kExitOk;
}

int cmd_factor(const RunConfig& cfg, std::ostream& out) {
  factor_options(cfg);
  const auto t0 = Clock::now();
  const Prepared p = prepare(load_matrix(cfg.inputs.at(0), cfg.seed), cfg.plan.sample_points);
  const FactorOptions options = factor_options(cfg, &p.a);
  const BlockingPlan plan = make_plan(p, cfg.plan);
  const BlockGrid grid = partition(p.filled, p.a, plan);
  const DependencyTree tree = dependency_levels(grid);
  const double preprocess = seconds_since(t0);

  std::vector<double> times;
  std::optional<LUFactors> lu;
  for (Index r = 0; r < cfg.repeats; ++r) {
    const auto t1 = Clock::now();
    lu = factorize(grid, tree, options);
    times.push_back(seconds_since(t1));
  }
  const double res = residual(p.a, *lu);
  const double solve_err = manufactured_solve_error(p.a, *lu);

  Report report{{"metric", "value"}, {}};
  auto emit = [&](const std::string& key, const std::string& value) {
    out << key << ": " << value << '\n';
    report.rows.push_back({key, value});
  };
  emit("n", std::to_string(p.a.n));
  emit("blocks", std::to_string(plan.block_count()));
  emit("tasks", std::to_string(tree.task_count()));
  emit("levels", std::to_string(tree.level_count()));
  emit("workers", std::to_string(options.workers));
  emit("residual", format_real(res));
  emit("solve_error", format_real(solve_err));
  emit("perturbed_pivots", std::to_string(lu->stats.perturbed_pivots));
  emit("preprocess_time_s", format_real(preprocess));
  emit("numeric_time_s", format_real(median(times)));
  if (!cfg.out.empty()) write_report_csv(report, cfg.out);
  return kExitOk;
}

struct BenchPlan {
  std::string label;
  BlockingPlan plan;
};

const std::vector<std::string> kBenchHeader = {
    "matrix", "n", "plan", "block_size", "blocks", "status", "nnz_filled", "cv_block_nnz", "last_level_share",
    "levels", "makespan_nnz", "makespan_flops", "residual", "solve_error", "numeric_time_s", "preprocess_time_s"};

int cmd_bench(const RunConfig& cfg, std::ostream& out) {
  factor_options(cfg);
  if (cfg.model_workers < 1) throw Error(ErrorKind::BadParams, "--model-workers must be >= 1");
  Report report{kBenchHeader, {}};

  for (const auto& source : cfg.inputs) {
    const std::string name = csv_safe(matrix_name(source));
    std::optional<Prepared> p;
    double prep_time = 0.0;
    try {
      const auto t0 = Clock::now();
      p = prepare(load_matrix(source, cfg.seed), cfg.plan.sample_points);
      prep_time = seconds_since(t0);
    } catch (const std::exception& e) {
      std::vector<std::string> row(kBenchHeader.size());
      row[0] = name;
      row[2] = "-";
      row[5] = csv_safe(std::string("error: ") + e.what());
      report.rows.push_back(std::move(row));
      continue;
    }
    const Index n = p->a.n;
    const FactorOptions options = factor_options(cfg, &p->a);

    std::vector<BenchPlan> plans;
    try {
      plans.push_back({"irregular", irregular_plan(p->curve, irregular_options(cfg.plan))});
    } catch (const std::exception& e) {
      std::vector<std::string> row(kBenchHeader.size());
      row[0] = name;
      row[1] = std::to_string(n);
      row[2] = "irregular";
      row[5] = csv_safe(std::string("error: ") + e.what());
      report.rows.push_back(std::move(row));
    }
    for (Index bs : kCandidateBlockSizes) {
      if (bs <= n) plans.push_back({"regular", regular_plan(n, bs)});
    }
    const Index pangulu_bs = std::min(n, pangulu_size_select(n, p->filled.nnz_filled()));
    plans.push_back({"pangulu", regular_plan(n, pangulu_bs)});

    // Best regular plan by the makespan model; timings would make it nondeterministic.
    std::optional<size_t> best;
    double best_makespan = 0.0;
    std::vector<std::vector<std::string>> rows;
    for (size_t k = 0; k < plans.size(); ++k) {
      const auto& [label, plan] = plans[k];
      std::vector<std::string> row(kBenchHeader.size());
      row[0] = name;
      row[1] = std::to_string(n);
      row[2] = label;
      row[3] = plan.strategy == Strategy::regular ? std::to_string(plan.block_size) : "";
      row[4] = std::to_string(plan.block_count());
      row[6] = std::to_string(p->filled.nnz_filled());
      try {
        const auto t0 = Clock::now();
        const BlockGrid grid = partition(p->filled, p->a, plan);
        const DependencyTree tree = dependency_levels(grid);
        const double plan_prep = prep_time + seconds_since(t0);
        const BalanceReport balance = balance_report(grid, tree);
        const double ms_nnz = makespan_model(tree, cfg.model_workers, CostModel::nnz);
        const double ms_flops = makespan_model(tree, cfg.model_workers, CostModel::flops);
        row[7] = format_real(balance.per_block_nnz.cv);
        row[8] = format_real(balance.last_level_share);
        row[9] = std::to_string(tree.level_count());
        row[10] = format_real(ms_nnz);
        row[11] = format_real(ms_flops);
        if (plan.strategy == Strategy::regular && (!best || ms_flops < best_makespan)) {
          best = k;
          best_makespan = ms_flops;
        }
        std::vector<double> times;
        std::optional<LUFactors> lu;
        for (Index r = 0; r < cfg.repeats; ++r) {
          const auto t1 = Clock::now();
          lu = factorize(grid, tree, options);
          times.push_back(seconds_since(t1));
        }
        row[5] = "ok";
        row[12] = format_real(residual(p->a, *lu));
        row[13] = format_real(manufactured_solve_error(p->a, *lu));
        row[14] = format_real(median(times));
        row[15] = format_real(plan_prep);
      } catch (const std::exception& e) {
        row[5] = csv_safe(std::string("error: ") + e.what());
      }
      rows.push_back(std::move(row));
    }
    if (best) {
      auto copy = rows[*best];
      copy[2] = "best-regular";
      rows.push_back(std::move(copy));
    }
    for (auto& r : rows) report.rows.push_back(std::move(r));
  }

  if (cfg.out.empty()) write_report_csv(report, out);
  else write_report_csv(report, cfg.out);
  return kExitOk;
}

int cmd_generate(const RunConfig& cfg, std::ostream& out) {
  if (cfg.out.empty()) throw Error(ErrorKind::BadParams, "--out is required");
  GeneratorParams params;
  params.border = cfg.border;
  params.bandwidth = cfg.bandwidth;
  params.density = cfg.density;
  params.seed = cfg.seed;
  const CscMatrix a = generate(parse_generator_kind(cfg.kind), cfg.n, params);
  write_matrix_market(a, cfg.out);
  out << "n: " << a.n << '\n' << "nnz: " << a.nnz() << '\n';
  return kExitOk;
}

void add_plan_flags(CLI::App* app, PlanFlags& f) {
  app->add_option("--strategy", f.strategy, "irregular or regular")->check(CLI::IsMember({"irregular", "regular"}));
  app->add_option("--block-size", f.block_size, "regular block size (default: fixed-size selection)");
  app->add_option("--sample-points", f.sample_points, "curve samples")->capture_default_str();
  app->add_option("--step", f.step, "samples per window")->capture_default_str();
  app->add_option("--max-num", f.max_num, "windows merged before a forced split")->capture_default_str();
  app->add_option("--threshold", f.threshold, "split threshold, a number or 'linear' for step/sample-points")
      ->capture_default_str();
  app->add_flag("--overlapping", f.overlapping, "advance one sample at a time");
}

void add_factor_flags(CLI::App* app, RunConfig& cfg) {
  app->add_option("--workers", cfg.workers, "worker threads")->envname("LUBLOCK_WORKERS")->capture_default_str();
  app->add_option("--pivot-tol", cfg.pivot_tol, "relative pivot threshold")->capture_default_str();
  app->add_option("--static-pivot", cfg.static_pivot, "replace rejected pivots by eps * max|A|");
  app->add_option("--repeats", cfg.repeats, "timed runs; the median is reported")->capture_default_str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Sparse LU with irregular blocking", "lublock"};
  app.require_subcommand(1);

  auto* analyze = app.add_subcommand("analyze", "fill statistics and diagonal distribution curve");
  analyze->add_option("matrix", cfg.inputs, "Matrix Market file or gen:<kind>:<n>[:<param>]")->required()->expected(1);
  analyze->add_option("--sample-points", cfg.plan.sample_points, "curve samples")->capture_default_str();
  analyze->add_option("--out", cfg.out, "curve CSV");

  auto* plan = app.add_subcommand("plan", "compute a blocking plan");
  plan->add_option("matrix", cfg.inputs, "Matrix Market file or gen:<kind>:<n>[:<param>]")->required()->expected(1);
  add_plan_flags(plan, cfg.plan);
  plan->add_option("--out", cfg.out, "plan JSON");

  auto* factor = app.add_subcommand("factor", "blocked LU factorization");
  factor->add_option("matrix", cfg.inputs, "Matrix Market file or gen:<kind>:<n>[:<param>]")->required()->expected(1);
  add_plan_flags(factor, cfg.plan);
  add_factor_flags(factor, cfg);
  factor->add_option("--out", cfg.out, "metric CSV");

  auto* bench = app.add_subcommand("bench", "compare irregular and regular plans");
  bench->add_option("matrices", cfg.inputs, "Matrix Market files or gen:<kind>:<n>[:<param>]");
  add_plan_flags(bench, cfg.plan);
  add_factor_flags(bench, cfg);
  bench->add_option("--model-workers", cfg.model_workers, "units in the makespan model")->capture_default_str();
  bench->add_option("--out", cfg.out, "comparison CSV (default: stdout)");

  auto* gen = app.add_subcommand("generate", "write a test matrix");
  gen->add_option("kind", cfg.kind, "tridiagonal, dense, arrowhead or random_spd")->required();
  gen->add_option("n", cfg.n, "dimension")->required();
  gen->add_option("--border", cfg.border, "arrowhead border width");
  gen->add_option("--bandwidth", cfg.bandwidth, "random_spd half bandwidth");
  gen->add_option("--density", cfg.density, "random_spd band density")->capture_default_str();
  gen->add_option("--out", cfg.out, "Matrix Market output")->required();

  for (auto* sub : {analyze, plan, factor, bench, gen}) sub->add_option("--seed", cfg.seed, "generator seed")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*analyze) return cmd_analyze(cfg, out);
    if (*plan) return cmd_plan(cfg, out);
    if (*factor) return cmd_factor(cfg, out);
    if (*bench) return cmd_bench(cfg, out);
    return cmd_generate(cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace lublock::cli
