#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <zlib.h>

#include "doctest.h"

#include "cyclic/error.hpp"
#include "cyclic/io.hpp"
#include "cyclic/normal.hpp"

using namespace cyclic;
namespace fs = std::filesystem;

namespace {

const fs::path fixtures = CYCLICSHIFT_FIXTURES_DIR;

struct Failure {
  std::size_t line = 0;
  std::string message;
};

Failure load_failure(const fs::path& p, NaPolicy policy = NaPolicy::reject) {
  try {
    load_matrix(p, policy);
  } catch (const InputError& e) {
    return {e.line(), e.what()};
  }
  return {};
}

LoadedMatrix parse_text(const std::string& text, NaPolicy policy = NaPolicy::reject) {
  std::istringstream in(text);
  return parse_matrix(in, policy);
}

fs::path temp_path(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "cyclicshift_test_io";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("three-marker fixture") {
  const auto loaded = load_matrix(fixtures / "three_markers.tsv");
  const auto& x = loaded.matrix;
  CHECK(x.rows() == 2);
  CHECK(x.cols() == 3);
  CHECK(x.row_ids() == std::vector<std::string>{"A", "B"});
  CHECK(std::vector<double>(x.row(0).begin(), x.row(0).end()) == std::vector<double>{0.5, 1.5, -0.3});
  CHECK(std::vector<double>(x.row(1).begin(), x.row(1).end()) == std::vector<double>{-0.2, 0.1, 0.9});
  CHECK(x.columns()[2] == ColumnAnnotation{"c3", "2", 500});
  CHECK(loaded.provenance.sha256 == file_sha256(fixtures / "three_markers.tsv"));
  CHECK(loaded.provenance.sha256.size() == 64);
  CHECK(loaded.provenance.imputed_cells == 0);
}

TEST_CASE("file_sha256 of known content") {
  const auto p = temp_path("abc.txt");
  std::ofstream(p) << "abc";
  CHECK(file_sha256(p) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("each malformed fixture gets its own diagnostic and line") {
  auto f = load_failure(fixtures / "ragged.tsv");
  CHECK(f.line == 3);
  CHECK(f.message.find("ragged row: expected 5 fields, found 4") != std::string::npos);

  f = load_failure(fixtures / "non_numeric.tsv");
  CHECK(f.line == 3);
  CHECK(f.message.find("non-numeric value 'abc'") != std::string::npos);

  f = load_failure(fixtures / "unsorted.tsv");
  CHECK(f.line == 3);
  CHECK(f.message.find("unsorted positions") != std::string::npos);

  f = load_failure(fixtures / "duplicate_id.tsv");
  CHECK(f.line == 4);
  CHECK(f.message.find("duplicate marker_id 'c1' (first seen on line 2)") != std::string::npos);

  f = load_failure(fixtures / "with_na.tsv");
  CHECK(f.line == 3);
  CHECK(f.message.find("NA") != std::string::npos);

  CHECK_THROWS_AS(load_matrix(fixtures / "missing.tsv"), InputError);
}

TEST_CASE("other structural errors") {
  CHECK_THROWS_AS(parse_text("id\tchrom\tpos\tA\nc1\t1\t1\t0\nc2\t1\t2\t0\n"), InputError);
  CHECK_THROWS_AS(parse_text("marker_id\tchrom\tpos\tA\tA\nc1\t1\t1\t0\t0\nc2\t1\t2\t0\t0\n"), InputError);
  CHECK_THROWS_AS(parse_text("marker_id\tchrom\tpos\tA\nc1\t1\t1\t0\n"), InputError);  // m < 2
  CHECK_THROWS_AS(parse_text("marker_id\tchrom\tpos\tA\nc1\t1\t1\t0\nc2\t1\t1\t0\n"), InputError);  // equal pos
  const std::string split = "marker_id\tchrom\tpos\tA\nc1\t1\t1\t0\nc2\t2\t1\t0\nc3\t1\t5\t0\n";
  try {
    parse_text(split);
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(e.line() == 4);
    CHECK(std::string(e.what()).find("not contiguous") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_text("marker_id\tchrom\tpos\tA\nc1\t1\t1\tinf\nc2\t1\t2\t0\n"), Error);
}

TEST_CASE("comments, blank lines, CRLF and missing annotations") {
  const auto x = parse_text(
                     "# produced by hand\r\n"
                     "marker_id\tchrom\tpos\tA\r\n"
                     "\r\n"
                     "c1\t.\t.\t1.25\r\n"
                     "c2\t.\t.\t-2\r\n")
                     .matrix;
  CHECK(x.cols() == 2);
  CHECK(x(0, 0) == 1.25);
  CHECK_FALSE(x.columns()[0].chromosome.has_value());
  CHECK_FALSE(x.columns()[1].position_bp.has_value());
}

TEST_CASE("NA imputation uses the sample's median") {
  const auto loaded = load_matrix(fixtures / "with_na.tsv", NaPolicy::impute_row_median);
  const auto& x = loaded.matrix;
  // Observed values of sample A: 0.5, -0.3, 2.5.
  std::vector<double> observed{0.5, -0.3, 2.5};
  std::sort(observed.begin(), observed.end());
  CHECK(x(0, 1) == observed[1]);
  CHECK(x(1, 1) == 0.1);
  CHECK(loaded.provenance.imputed_cells == 1);
  CHECK(loaded.provenance.na_policy == "impute-row-median");

  const auto even = parse_text("marker_id\tchrom\tpos\tA\nc1\t1\t1\t1\nc2\t1\t2\tNA\nc3\t1\t3\t4\n",
                               NaPolicy::impute_row_median);
  CHECK(even.matrix(0, 1) == 2.5);
  CHECK_THROWS_AS(parse_text("marker_id\tchrom\tpos\tA\nc1\t1\t1\tNA\nc2\t1\t2\tNA\n", NaPolicy::impute_row_median),
                  InputError);
  CHECK(parse_na_policy("reject") == NaPolicy::reject);
  CHECK_THROWS_AS(parse_na_policy("drop"), DomainError);
}

TEST_CASE("write_matrix round-trips, plain and gzip") {
  const auto x = load_matrix(fixtures / "three_markers.tsv").matrix;
  const auto plain = temp_path("rt.tsv");
  write_matrix(x, plain);
  CHECK(load_matrix(plain).matrix == x);

  std::ostringstream os;
  write_matrix(x, os);
  const std::string text = os.str();
  const auto gz = temp_path("rt.tsv.gz");
  gzFile f = gzopen(gz.c_str(), "wb");
  REQUIRE(f != nullptr);
  gzwrite(f, text.data(), static_cast<unsigned>(text.size()));
  gzclose(f);
  const auto loaded = load_matrix(gz);
  CHECK(loaded.matrix == x);
  CHECK(loaded.provenance.sha256 == file_sha256(gz));
  CHECK(loaded.provenance.sha256 != file_sha256(plain));

  const std::vector<double> awkward{0.1, 1.0 / 3.0, -2.5e-300, 12345678.9};
  const MarkerMatrix y(1, 4, awkward);
  std::ostringstream oy;
  write_matrix(y, oy);
  CHECK(parse_text(oy.str()).matrix.values()[1] == 1.0 / 3.0);
  CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("paired_difference") {
  const auto t = load_matrix(fixtures / "tumor.tsv").matrix;
  const auto n = load_matrix(fixtures / "normal.tsv").matrix;
  const auto d = paired_difference(t, n);
  CHECK(d(0, 0) == 0.8 - 0.3);
  CHECK(d(0, 1) == 0.0);
  CHECK(d.columns() == t.columns());
  try {
    paired_difference(t, load_matrix(fixtures / "normal_mismatch.tsv").matrix);
    FAIL("expected an error");
  } catch (const InputError& e) {
    const std::string what = e.what();
    CHECK(what.find("x2") != std::string::npos);
    CHECK(what.find("x9") != std::string::npos);
  }
  CHECK_THROWS_AS(paired_difference(t, load_matrix(fixtures / "three_markers.tsv").matrix), DimensionError);
}

TEST_CASE("zscore_transform") {
  const auto p = load_matrix(fixtures / "pvalues.tsv").matrix;
  const auto z = zscore_transform(p);
  CHECK(z.matrix(0, 0) == 0.0);
  CHECK_FALSE(std::signbit(z.matrix(0, 0)));
  CHECK(z.matrix(1, 0) == doctest::Approx(1.959964).epsilon(1e-6));
  CHECK(z.matrix(0, 1) == 0.0);  // 0.9 -> -1.28 floored
  CHECK(z.matrix(1, 1) == 0.0);  // p = 1 clamped, then floored
  CHECK(z.matrix(0, 2) == doctest::Approx(3.090232306167813).epsilon(1e-12));
  CHECK(z.clamped_cells == 1);
  CHECK(z.matrix.columns() == p.columns());

  const auto unfloored = zscore_transform(p, -1e300);
  CHECK(unfloored.matrix(0, 1) == doctest::Approx(-1.2815515655446004).epsilon(1e-12));

  // Smaller p values give larger scores.
  std::vector<double> grid;
  for (int k = 1; k <= 200; ++k) grid.push_back(k / 200.0);
  const auto g = zscore_transform(MarkerMatrix(1, grid.size(), grid), -1e300).matrix;
  for (std::size_t j = 1; j < grid.size(); ++j) CHECK(g(0, j) < g(0, j - 1));

  CHECK_THROWS_AS(zscore_transform(MarkerMatrix::from_rows({{0.5, 0.0}})), DomainError);
  CHECK_THROWS_AS(zscore_transform(MarkerMatrix::from_rows({{0.5, 1.5}})), DomainError);
  CHECK_THROWS_AS(zscore_transform(MarkerMatrix::from_rows({{0.5, -0.1}})), DomainError);
}

TEST_CASE("column stats CSV round trip") {
  const auto x = load_matrix(fixtures / "three_markers.tsv").matrix;
  const std::vector<double> stats{0.3, 1.6, 0.6};
  std::ostringstream os;
  write_column_stats(x, stats, os);
  CHECK(os.str().rfind("marker_id,chrom,pos,stat\nc1,1,1000,0.3\n", 0) == 0);
  std::istringstream in(os.str());
  const auto rows = read_column_stats(in);
  REQUIRE(rows.size() == 3);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(rows[j].column == x.columns()[j]);
    CHECK(rows[j].stat == stats[j]);
  }

  const MarkerMatrix bare(1, 2, {1.0, 2.0});
  std::ostringstream ob;
  write_column_stats(bare, std::vector<double>{1.0, 2.0}, ob);
  CHECK(ob.str() == "marker_id,chrom,pos,stat\nm1,,,1\nm2,,,2\n");
  std::istringstream ib(ob.str());
  CHECK_FALSE(read_column_stats(ib)[0].column.chromosome.has_value());
  CHECK_THROWS_AS(write_column_stats(bare, std::vector<double>{1.0}, ob), DimensionError);
}
