#include <doctest.h>

#include <cmath>

#include "qpdlab/linalg.hpp"
#include "qpdlab/rng.hpp"

using namespace qpdlab;

TEST_SUITE("linalg") {

TEST_CASE("determinant of small matrices") {
  CHECK(linalg::determinant(Matrix::from_rows({{3.0}})) == doctest::Approx(3.0));
  CHECK(linalg::determinant(Matrix::from_rows({{1, 2}, {3, 4}})) ==
        doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(linalg::determinant(Matrix::from_rows({{2, 0, 0}, {0, 3, 0}, {0, 0, 4}})) ==
        doctest::Approx(24.0).epsilon(1e-12));
  // singular: second row is a multiple of the first
  CHECK(linalg::determinant(Matrix::from_rows({{1, 2}, {2, 4}})) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("determinant is multiplicative") {
  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 2 + rng.next_u64() % 5;
    Matrix a(n, n), b(n, n);
    for (auto& v : a.data) v = rng.uniform(-1.0, 1.0);
    for (auto& v : b.data) v = rng.uniform(-1.0, 1.0);
    Matrix ab(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += a(i, k) * b(k, j);
        ab(i, j) = s;
      }
    const double expected = linalg::determinant(a) * linalg::determinant(b);
    CHECK(linalg::determinant(ab) == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("solve recovers known solutions") {
  const Matrix a = Matrix::from_rows({{2, 1}, {1, 3}});
  const auto x = linalg::solve(a, {5, 10});
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(x[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("solve residual is tiny on random systems") {
  Rng rng(17);
  for (int rep = 0; rep < 25; ++rep) {
    const std::size_t n = 1 + rng.next_u64() % 20;
    Matrix a(n, n);
    for (auto& v : a.data) v = rng.uniform(-1.0, 1.0);
    std::vector<double> b(n);
    for (auto& v : b) v = rng.uniform(-1.0, 1.0);
    const auto x = linalg::solve(a, b);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += a(i, j) * x[j];
      CHECK(s == doctest::Approx(b[i]).epsilon(1e-8));
    }
  }
}

TEST_CASE("singular systems are rejected") {
  const Matrix a = Matrix::from_rows({{1, 2}, {2, 4}});
  CHECK_THROWS_AS(linalg::solve(a, {1, 2}), std::runtime_error);
  CHECK_THROWS_AS(linalg::determinant(Matrix::from_rows({{1, 2}})), std::invalid_argument);
}

}  // TEST_SUITE
