#include "lublock/matrix_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace lublock {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(std::move(t));
  return out;
}

Index parse_index(const std::string& tok, const std::string& line) {
  Index v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw Error(ErrorKind::MalformedEntry, "bad integer in line '" + line + "'");
  }
  return v;
}

double parse_real(const std::string& tok, const std::string& line) {
  try {
    size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::MalformedEntry, "bad value in line '" + line + "'");
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorKind::IoError, "write to '" + path.string() + "' failed");
}

}  // namespace

CscMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "'");
  return parse_matrix_market(in);
}

CscMatrix parse_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::MalformedEntry, "missing Matrix Market header");
  auto head = tokens(lower(line));
  if (head.size() != 5 || head[0] != "%%matrixmarket" || head[1] != "matrix") {
    throw Error(ErrorKind::MalformedEntry, "bad header '" + line + "'");
  }
  if (head[2] != "coordinate") throw Error(ErrorKind::UnsupportedField, "only coordinate format is supported");
  const std::string& field = head[3];
  if (field != "real" && field != "integer" && field != "pattern" && field != "double") {
    throw Error(ErrorKind::UnsupportedField, "field '" + field + "'");
  }
  const std::string& symmetry = head[4];
  if (symmetry != "general" && symmetry != "symmetric") {
    throw Error(ErrorKind::UnsupportedField, "symmetry '" + symmetry + "'");
  }
  const bool pattern = field == "pattern";
  const bool symmetric = symmetry == "symmetric";

  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '%') continue;
    if (tokens(line).empty()) continue;
    break;
  }
  auto size = tokens(line);
  if (size.size() != 3) throw Error(ErrorKind::MalformedEntry, "bad size line '" + line + "'");
  const Index rows = parse_index(size[0], line);
  const Index cols = parse_index(size[1], line);
  const Index declared = parse_index(size[2], line);
  if (rows != cols) {
    throw Error(ErrorKind::NonSquare, std::to_string(rows) + " x " + std::to_string(cols));
  }
  if (rows <= 0) throw Error(ErrorKind::EmptyMatrix, "order " + std::to_string(rows));
  if (declared < 0) throw Error(ErrorKind::MalformedEntry, "negative entry count");

  const size_t expected_tokens = pattern ? 2 : 3;
  std::vector<Triplet> entries;
  entries.reserve(symmetric ? 2 * declared : declared);
  Index seen = 0;
  while (seen < declared && std::getline(in, line)) {
    if (!line.empty() && line[0] == '%') continue;
    auto tok = tokens(line);
    if (tok.empty()) continue;
    if (tok.size() != expected_tokens) {
      throw Error(ErrorKind::MalformedEntry, "expected " + std::to_string(expected_tokens) +
                                                 " tokens in line '" + line + "'");
    }
    const Index i = parse_index(tok[0], line) - 1;
    const Index j = parse_index(tok[1], line) - 1;
    if (i < 0 || i >= rows || j < 0 || j >= cols) {
      throw Error(ErrorKind::MalformedEntry, "index out of range in line '" + line + "'");
    }
    const double v = pattern ? 1.0 : parse_real(tok[2], line);
    entries.push_back({i, j, v});
    if (symmetric && i != j) entries.push_back({j, i, v});
    ++seen;
  }
  if (seen != declared) {
    throw Error(ErrorKind::MalformedEntry, "expected " + std::to_string(declared) + " entries, found " +
                                               std::to_string(seen));
  }
  return csc_from_triplets(rows, entries);
}

void write_matrix_market(const CscMatrix& a, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.n << ' ' << a.n << ' ' << a.nnz() << '\n';
  for (Index j = 0; j < a.n; ++j) {
    for (Index p = a.col_ptr[j]; p < a.col_ptr[j + 1]; ++p) {
      out << a.row_idx[p] + 1 << ' ' << j + 1 << ' ' << format_real(a.values[p]) << '\n';
    }
  }
  finish(out, path);
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_curve_csv(const PercentCurve& curve, std::ostream& out) {
  out << "index,fraction\n";
  for (Index k = 0; k < static_cast<Index>(curve.pct.size()); ++k) {
    out << curve.position(k) << ',' << format_real(curve.pct[k]) << '\n';
  }
}

void write_curve_csv(const PercentCurve& curve, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_curve_csv(curve, out);
  finish(out, path);
}

std::string plan_to_json(const BlockingPlan& plan) {
  nlohmann::ordered_json j;
  j["n"] = plan.n;
  j["strategy"] = std::string(to_string(plan.strategy));
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  if (plan.strategy == Strategy::regular) {
    params["block_size"] = plan.block_size;
  } else {
    params["sample_points"] = plan.sample_points;
    params["step"] = plan.step;
    params["max_num"] = plan.max_num;
    params["threshold"] = plan.threshold;
    params["overlapping_windows"] = plan.overlapping_windows;
  }
  j["params"] = params;
  j["positions"] = plan.positions;
  return j.dump();
}

void write_plan_json(const BlockingPlan& plan, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << plan_to_json(plan) << '\n';
  finish(out, path);
}

BlockingPlan plan_from_json(std::string_view text) {
  BlockingPlan plan;
  try {
    auto j = nlohmann::json::parse(text);
    plan.n = j.at("n").get<Index>();
    const auto strategy = j.at("strategy").get<std::string>();
    if (strategy == "regular") {
      plan.strategy = Strategy::regular;
    } else if (strategy == "irregular") {
      plan.strategy = Strategy::irregular;
    } else {
      throw Error(ErrorKind::BadParams, "unknown strategy '" + strategy + "'");
    }
    const auto& params = j.at("params");
    if (plan.strategy == Strategy::regular) {
      plan.block_size = params.value("block_size", Index{0});
    } else {
      plan.sample_points = params.value("sample_points", Index{0});
      plan.step = params.value("step", Index{0});
      plan.max_num = params.value("max_num", Index{0});
      plan.threshold = params.value("threshold", 0.0);
      plan.overlapping_windows = params.value("overlapping_windows", false);
    }
    plan.positions = j.at("positions").get<std::vector<Index>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::BadParams, std::string("plan JSON: ") + e.what());
  }
  plan.validate();
  return plan;
}

void write_report_csv(const Report& report, std::ostream& out) {
  auto row = [&](const std::vector<std::string>& cells) {
    for (size_t c = 0; c < cells.size(); ++c) out << (c ? "," : "") << cells[c];
    out << '\n';
  };
  row(report.header);
  for (const auto& r : report.rows) row(r);
}

void write_report_csv(const Report& report, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_report_csv(report, out);
  finish(out, path);
}

}  // namespace lublock
