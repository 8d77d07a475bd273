#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lublock/blocking.hpp"
#include "lublock/features.hpp"
#include "lublock/matrix_io.hpp"
#include "oracles.hpp"

using namespace lublock;

namespace {

CscMatrix parse(const std::string& text) {
  std::istringstream in(text);
  return parse_matrix_market(in);
}

ErrorKind parse_error(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected a parse error");
  return ErrorKind::BadParams;
}

}  // namespace

TEST_CASE("general coordinate file transcribes into sorted CSC") {
  const auto a = parse(
      "%%MatrixMarket matrix coordinate real general\n"
      "% comment\n"
      "3 3 3\n"
      "1 1 2.0\n2 1 1.0\n2 2 3.0\n");
  CHECK(a.n == 3);
  CHECK(a.col_ptr == std::vector<Index>{0, 2, 3, 3});
  CHECK(a.row_idx == std::vector<Index>{0, 1, 1});
  CHECK(a.values == std::vector<double>{2, 1, 3});
}

TEST_CASE("symmetric storage is mirrored") {
  const auto a = parse("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 1\n2 1 5.0\n");
  CHECK(a.at(1, 0) == 5.0);
  CHECK(a.at(0, 1) == 5.0);
  CHECK(a.nnz() == 3);
  const auto t = transpose(a);
  CHECK(t.col_ptr == a.col_ptr);
  CHECK(t.row_idx == a.row_idx);
}

TEST_CASE("duplicates are summed and pattern entries read as one") {
  const auto a = parse("%%MatrixMarket matrix coordinate real general\n1 1 2\n1 1 2.0\n1 1 3.0\n");
  CHECK(a.nnz() == 1);
  CHECK(a.values[0] == 5.0);
  const auto p = parse("%%MatrixMarket matrix coordinate pattern general\n2 2 2\n1 1\n2 2\n");
  CHECK(p.values == std::vector<double>{1.0, 1.0});
  const auto i = parse("%%MatrixMarket matrix coordinate integer general\n2 2 1\n2 1 -7\n");
  CHECK(i.at(1, 0) == -7.0);
}

TEST_CASE("malformed input is rejected with the matching error kind") {
  CHECK(parse_error("%%MatrixMarket matrix coordinate real general\n2 3 1\n1 1 1\n") == ErrorKind::NonSquare);
  CHECK(parse_error("%%MatrixMarket matrix coordinate complex general\n2 2 1\n1 1 1 0\n") == ErrorKind::UnsupportedField);
  CHECK(parse_error("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n") == ErrorKind::UnsupportedField);
  CHECK(parse_error("%%MatrixMarket matrix coordinate real hermitian\n2 2 1\n1 1 1\n") == ErrorKind::UnsupportedField);
  CHECK(parse_error("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n") == ErrorKind::MalformedEntry);
  CHECK(parse_error("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n") == ErrorKind::MalformedEntry);
  CHECK(parse_error("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1\n") == ErrorKind::MalformedEntry);
  CHECK(parse_error("%%MatrixMarket matrix coordinate real general\n0 0 0\n") == ErrorKind::EmptyMatrix);
  CHECK_THROWS_AS(read_matrix_market("/nonexistent/matrix.mtx"), Error);
}

TEST_CASE("csc_from_triplets") {
  const std::vector<Triplet> id{{0, 0, 1}, {1, 1, 1}};
  CHECK(csc_from_triplets(2, id).col_ptr == std::vector<Index>{0, 1, 2});
  CHECK(csc_from_triplets(3, {}).col_ptr == std::vector<Index>{0, 0, 0, 0});

  const std::vector<Triplet> cancel{{1, 0, 4}, {0, 0, 1}, {1, 0, -4}};
  const auto z = csc_from_triplets(2, cancel);
  CHECK(z.contains(1, 0));
  CHECK(z.at(1, 0) == 0.0);

  const std::vector<Triplet> bad{{2, 0, 1}};
  CHECK_THROWS_AS(csc_from_triplets(2, bad), Error);
}

TEST_CASE("triplet round trip yields the sorted entry set") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<Index> idx(0, 9);
    std::vector<Triplet> t;
    std::set<std::pair<Index, Index>> seen;
    for (int k = 0; k < 30; ++k) {
      const Index r = idx(rng), c = idx(rng);
      if (seen.insert({r, c}).second) t.push_back({r, c, static_cast<double>(k + 1)});
    }
    const auto a = csc_from_triplets(10, t);
    a.validate();
    auto back = to_triplets(a);
    std::sort(t.begin(), t.end(), [](const Triplet& x, const Triplet& y) {
      return std::pair(x.col, x.row) < std::pair(y.col, y.row);
    });
    CHECK(back == t);
  }
}

TEST_CASE("generators") {
  CHECK(generate(GeneratorKind::tridiagonal, 4).nnz() == 10);
  CHECK(generate(GeneratorKind::dense, 3).nnz() == 9);

  GeneratorParams gp;
  gp.border = 10;
  const auto arrow = generate(GeneratorKind::arrowhead, 100, gp);
  Index mask = 0;
  for (Index i = 0; i < 100; ++i) {
    for (Index j = 0; j < 100; ++j) mask += (i == j || i >= 90 || j >= 90) ? 1 : 0;
  }
  CHECK(mask == 1990);
  CHECK(arrow.nnz() == mask);

  for (auto kind : {GeneratorKind::tridiagonal, GeneratorKind::dense, GeneratorKind::arrowhead, GeneratorKind::random_spd}) {
    const auto a = generate(kind, 60, gp);
    const auto b = generate(kind, 60, gp);
    CHECK(a == b);
    // strict diagonal dominance by rows and columns
    const auto d = oracle::to_dense(a);
    for (Index i = 0; i < a.n; ++i) {
      double row = 0, col = 0;
      for (Index j = 0; j < a.n; ++j) {
        if (j != i) {
          row += std::abs(d(i, j));
          col += std::abs(d(j, i));
        }
      }
      CHECK(std::abs(d(i, i)) > std::max(row, col));
    }
  }
  gp.seed = 2;
  CHECK(generate(GeneratorKind::random_spd, 60, gp) != generate(GeneratorKind::random_spd, 60, GeneratorParams{}));
  gp.border = 100;
  CHECK_THROWS_AS(generate(GeneratorKind::arrowhead, 100, gp), Error);
  CHECK_THROWS_AS(parse_generator_kind("banana"), Error);
}

TEST_CASE("matrix market write and read round trip") {
  const auto path = std::filesystem::temp_directory_path() / "lublock_roundtrip.mtx";
  const auto a = generate(GeneratorKind::random_spd, 40);
  write_matrix_market(a, path);
  CHECK(read_matrix_market(path) == a);
  std::filesystem::remove(path);
}

TEST_CASE("curve CSV, plan JSON and report CSV formats") {
  PercentCurve c{4, 2, {0.0, 0.25, 1.0}};
  std::ostringstream out;
  write_curve_csv(c, out);
  CHECK(out.str() == "index,fraction\n0,0\n2,0.25\n4,1\n");

  BlockingPlan plan;
  plan.n = 1000;
  plan.strategy = Strategy::irregular;
  plan.positions = {0, 800, 1000};
  plan.sample_points = 10;
  plan.step = 2;
  plan.max_num = 3;
  plan.threshold = 0.2;
  const auto json = plan_to_json(plan);
  CHECK(json.find("\"positions\":[0,800,1000]") != std::string::npos);
  const auto back = plan_from_json(json);
  CHECK(back.positions == plan.positions);
  CHECK(back.strategy == Strategy::irregular);
  CHECK(back.threshold == 0.2);

  std::ostringstream empty;
  write_report_csv(Report{{"metric", "plan", "blocks", "value"}, {}}, empty);
  CHECK(empty.str() == "metric,plan,blocks,value\n");
  CHECK(format_real(0.1) == "0.10000000000000001");
}
