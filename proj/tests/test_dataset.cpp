#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "qpdlab/dataset.hpp"

using namespace qpdlab;

namespace {

Schema two_numeric_schema() {
  Schema s;
  s.columns = {{"a", ColumnKind::numeric}, {"b", ColumnKind::numeric},
               {"label", ColumnKind::categorical}};
  s.label_column = "label";
  return s;
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("csv parsing flags missing cells") {
  const auto raw = parse_csv_text("a,b,label\n1,2,yes\n3,,no\n5,6,yes\n",
                                  two_numeric_schema());
  CHECK(raw.rows.size() == 3);
  CHECK(raw.missing_count() == 1);
  CHECK(raw.rows[1][1].missing);
}

TEST_CASE("header-only file yields zero rows") {
  const auto raw = parse_csv_text("a,b,label\n", two_numeric_schema());
  CHECK(raw.rows.empty());
}

TEST_CASE("wrong arity reports the line number") {
  CHECK_THROWS_WITH_AS(parse_csv_text("a,b,label\n1,2,yes\n3,4\n", two_numeric_schema()),
                       doctest::Contains("line 3"), std::runtime_error);
}

TEST_CASE("header mismatch is a schema error") {
  CHECK_THROWS_AS(parse_csv_text("a,wrong,label\n1,2,yes\n", two_numeric_schema()),
                  std::runtime_error);
  CHECK_THROWS_AS(parse_csv_text("a,b\n1,2\n", two_numeric_schema()), std::runtime_error);
}

TEST_CASE("schema json parsing") {
  const Schema s = Schema::from_json_text(
      R"({"columns":[{"name":"x","kind":"numeric"},{"name":"c","kind":"categorical"}],"label":"c"})");
  CHECK(s.columns.size() == 2);
  CHECK(s.columns[0].kind == ColumnKind::numeric);
  CHECK(s.label_index() == 1);
  CHECK_THROWS(Schema::from_json_text(
      R"({"columns":[{"name":"x","kind":"numeric"}],"label":"missing"})"));
}

TEST_CASE("mean imputation fills numeric gaps") {
  const auto raw =
      parse_csv_text("a,b,label\n1,9,yes\n,9,no\n3,9,yes\n", two_numeric_schema());
  const Dataset d = preprocess(raw);
  CHECK(d.x(0, 0) == doctest::Approx(1.0));
  CHECK(d.x(1, 0) == doctest::Approx(2.0));  // mean of {1, 3}
  CHECK(d.x(2, 0) == doctest::Approx(3.0));
}

TEST_CASE("categorical columns expand one-hot") {
  Schema s;
  s.columns = {{"c", ColumnKind::categorical}, {"label", ColumnKind::categorical}};
  s.label_column = "label";
  const Dataset d = preprocess(parse_csv_text("c,label\nA,x\nB,y\nA,x\n", s));
  REQUIRE(d.dim() == 2);
  CHECK(d.feature_names[0] == "c=A");
  CHECK(d.feature_names[1] == "c=B");
  CHECK(d.x(0, 0) == 1.0);
  CHECK(d.x(0, 1) == 0.0);
  CHECK(d.x(1, 0) == 0.0);
  CHECK(d.x(1, 1) == 1.0);
  CHECK(d.x(2, 0) == 1.0);
  // label: lexicographically smaller class name maps to 0
  CHECK(d.y == std::vector<int>{0, 1, 0});
  REQUIRE(d.onehot_groups.size() == 1);
  CHECK(d.onehot_groups[0] == std::pair<std::size_t, std::size_t>{0, 2});
}

TEST_CASE("one-hot groups sum to one on every row") {
  Schema s;
  s.columns = {{"c", ColumnKind::categorical}, {"d", ColumnKind::categorical},
               {"label", ColumnKind::categorical}};
  s.label_column = "label";
  std::ostringstream csv;
  csv << "c,d,label\n";
  const char* cs[] = {"p", "q", "r"};
  for (int i = 0; i < 30; ++i)
    csv << cs[i % 3] << "," << cs[(i * 7 + 1) % 3] << "," << (i % 2 ? "u" : "v") << "\n";
  const Dataset d = preprocess(parse_csv_text(csv.str(), s));
  for (const auto& [first, count] : d.onehot_groups)
    for (std::size_t i = 0; i < d.size(); ++i) {
      double sum = 0.0;
      for (std::size_t j = first; j < first + count; ++j) sum += d.x(i, j);
      CHECK(sum == doctest::Approx(1.0));
    }
}

TEST_CASE("missing categoricals take the column mode") {
  Schema s;
  s.columns = {{"c", ColumnKind::categorical}, {"label", ColumnKind::categorical}};
  s.label_column = "label";
  const Dataset d = preprocess(parse_csv_text("c,label\nA,x\nA,y\n,x\nB,y\n", s));
  CHECK(d.x(2, 0) == 1.0);  // imputed as the mode A
}

TEST_CASE("label errors") {
  Schema s = two_numeric_schema();
  CHECK_THROWS_AS(preprocess(parse_csv_text("a,b,label\n1,2,x\n3,4,y\n5,6,z\n", s)),
                  std::runtime_error);  // non-binary
  CHECK_THROWS_AS(preprocess(parse_csv_text("a,b,label\n1,2,\n", s)),
                  std::runtime_error);  // missing label
  CHECK_THROWS_AS(preprocess(parse_csv_text("a,b,label\n,2,x\n,4,y\n", s)),
                  std::runtime_error);  // all-missing numeric column
}

TEST_CASE("preprocess keeps clean numeric data unchanged") {
  const auto raw = parse_csv_text(
      "a,b,label\n0.125,-3.5,yes\n2.75,0.0625,no\n-1.5,4.25,yes\n", two_numeric_schema());
  const Dataset d = preprocess(raw);
  CHECK(d.x(0, 0) == 0.125);
  CHECK(d.x(0, 1) == -3.5);
  CHECK(d.x(1, 0) == 2.75);
  CHECK(d.x(1, 1) == 0.0625);
  CHECK(d.x(2, 0) == -1.5);
  CHECK(d.x(2, 1) == 4.25);
}

TEST_CASE("table-sized input keeps all rows") {
  // 401 rows, 5 raw dims (4 features + label)
  Schema s;
  s.columns = {{"f0", ColumnKind::numeric},
               {"f1", ColumnKind::numeric},
               {"f2", ColumnKind::numeric},
               {"f3", ColumnKind::numeric},
               {"label", ColumnKind::categorical}};
  s.label_column = "label";
  std::ostringstream csv;
  csv << "f0,f1,f2,f3,label\n";
  for (int i = 0; i < 401; ++i)
    csv << i << "," << i % 7 << "," << i % 3 << "," << (i * i) % 11 << ","
        << (i % 2 ? "spam" : "ham") << "\n";
  const Dataset d = preprocess(parse_csv_text(csv.str(), s));
  CHECK(d.size() == 401);
  CHECK(d.class_probs[0] + d.class_probs[1] == doctest::Approx(1.0));
}

TEST_CASE("split arithmetic and determinism") {
  Matrix x(10, 1);
  for (std::size_t i = 0; i < 10; ++i) x(i, 0) = static_cast<double>(i);
  std::vector<int> y(10);
  for (std::size_t i = 0; i < 10; ++i) y[i] = i % 2;
  const Dataset d = Dataset::from_matrix(std::move(x), std::move(y));

  const SplitDataset s1 = split(d, 0);
  CHECK(s1.train.size() == 7);
  CHECK(s1.test.size() == 3);

  const SplitDataset s2 = split(d, 0);
  CHECK(s1.train.x.data == s2.train.x.data);
  CHECK(s1.test.x.data == s2.test.x.data);

  // partitions are a permutation of the original rows
  std::multiset<double> seen;
  for (std::size_t i = 0; i < s1.train.size(); ++i) seen.insert(s1.train.x(i, 0));
  for (std::size_t i = 0; i < s1.test.size(); ++i) seen.insert(s1.test.x(i, 0));
  std::multiset<double> expect;
  for (std::size_t i = 0; i < 10; ++i) expect.insert(static_cast<double>(i));
  CHECK(seen == expect);
}

TEST_CASE("split of 401 rows is 280/121") {
  Matrix x(401, 1);
  std::vector<int> y(401);
  for (std::size_t i = 0; i < 401; ++i) {
    x(i, 0) = static_cast<double>(i);
    y[i] = i % 2;
  }
  const auto s = split(Dataset::from_matrix(std::move(x), std::move(y)), 3);
  CHECK(s.train.size() == 280);
  CHECK(s.test.size() == 121);
}

TEST_CASE("split rejects tiny datasets") {
  Matrix x(9, 1);
  std::vector<int> y(9, 0);
  const Dataset d = Dataset::from_matrix(std::move(x), std::move(y));
  CHECK_THROWS_AS(split(d, 0), std::invalid_argument);
}

TEST_CASE("synthesize is seeded and validates m") {
  const std::vector<double> a{2.0};
  CHECK_THROWS_AS(synthesize(1, 2, a, 3.0, 0), std::invalid_argument);
  const Dataset d1 = synthesize(1, 100, a, 3.0, 42);
  const Dataset d2 = synthesize(1, 100, a, 3.0, 42);
  CHECK(d1.x.data == d2.x.data);
  CHECK(d1.y == d2.y);
  REQUIRE(d1.truth.has_value());
  CHECK(d1.truth->b == 3.0);
  for (std::size_t i = 0; i < d1.size(); ++i) {
    CHECK(d1.x(i, 0) >= -1.0);
    CHECK(d1.x(i, 0) <= 1.0);
  }
}

TEST_CASE("discretization clamps to edge bins") {
  Matrix x(4, 1);
  x(0, 0) = 0.0;
  x(1, 0) = 1.0;
  x(2, 0) = 0.5;
  x(3, 0) = 0.25;
  const Dataset d = Dataset::from_matrix(std::move(x), {0, 1, 0, 1});
  CHECK(d.bin_count(0) == kNumericBins);
  CHECK(d.discretize(0, -5.0) == 0);
  CHECK(d.discretize(0, 0.0) == 0);
  CHECK(d.discretize(0, 1.0) == kNumericBins - 1);
  CHECK(d.discretize(0, 99.0) == kNumericBins - 1);
  CHECK(d.discretize(0, 0.55) == 5);
}

TEST_CASE("binary columns discretize to two bins") {
  Matrix x(4, 1);
  x(1, 0) = 1.0;
  x(3, 0) = 1.0;
  const Dataset d = Dataset::from_matrix(std::move(x), {0, 1, 0, 1});
  CHECK(d.bin_count(0) == 2);
  CHECK(d.discretize(0, 0.0) == 0);
  CHECK(d.discretize(0, 1.0) == 1);
}

}  // TEST_SUITE
