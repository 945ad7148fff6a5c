#include <doctest.h>

#include <cmath>
#include <vector>

#include "qpdlab/kernels.hpp"
#include "qpdlab/monitor.hpp"
#include "qpdlab/rng.hpp"

using namespace qpdlab;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (auto& v : m.data) v = rng.uniform(-2.0, 2.0);
  return m;
}

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-2.0, 2.0);
  return v;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("row correlations match the scalar pcc") {
  const Matrix m = random_matrix(40, 12, 7);
  const auto u = random_vec(12, 8);
  std::vector<double> out(m.rows);
  kernels::serial::row_correlations(m, u, out.data());
  for (std::size_t i = 0; i < m.rows; ++i) {
    const auto row = m.row_span(i);
    CHECK(out[i] == doctest::Approx(pcc(row, u)).epsilon(1e-12));
  }
}

TEST_CASE("parallel paths agree with the serial reference") {
  const Matrix m = random_matrix(3000, 40, 11);
  const auto u = random_vec(40, 12);
  std::vector<double> weight(m.rows);
  Rng wr(13);
  for (auto& w : weight) w = wr.uniform(0.0, 1.0);

  std::vector<double> serial_out(m.rows), par_out(m.rows);
  kernels::serial::row_correlations(m, u, serial_out.data());
  kernels::par::row_correlations(m, u, par_out.data());
  for (std::size_t i = 0; i < m.rows; ++i) CHECK(serial_out[i] == par_out[i]);

  const double s = kernels::serial::correlation_weighted_sum(m, u, weight);
  const double p = kernels::par::correlation_weighted_sum(m, u, weight);
  CHECK(p == doctest::Approx(s).epsilon(1e-12));

  std::vector<double> target(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) target[i] = (i % 3) ? 1.0 : 0.0;
  const auto a = random_vec(40, 14);
  std::vector<double> gs(41), gp(41);
  const double ls = kernels::serial::logistic_loss_grad(m, target, a, 0.25, gs);
  const double lp = kernels::par::logistic_loss_grad(m, target, a, 0.25, gp);
  CHECK(lp == doctest::Approx(ls).epsilon(1e-12));
  for (std::size_t j = 0; j < gs.size(); ++j)
    CHECK(gp[j] == doctest::Approx(gs[j]).epsilon(1e-12));
}

TEST_CASE("parallel reductions are reproducible") {
  const Matrix m = random_matrix(5000, 16, 21);
  const auto u = random_vec(16, 22);
  std::vector<double> weight(m.rows, 0.5);
  const double first = kernels::par::correlation_weighted_sum(m, u, weight);
  for (int rep = 0; rep < 3; ++rep)
    CHECK(kernels::par::correlation_weighted_sum(m, u, weight) == first);
}

TEST_CASE("negative correlations contribute nothing to the weighted sum") {
  Matrix m = Matrix::from_rows({{1.0, 2.0, 3.0}, {3.0, 2.0, 1.0}});
  const std::vector<double> u{1.0, 2.0, 3.0};
  const std::vector<double> weight{5.0, 7.0};
  // row 0 correlates +1, row 1 correlates -1 and is floored away
  CHECK(kernels::serial::correlation_weighted_sum(m, u, weight) ==
        doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("logistic gradient matches central finite differences") {
  const Matrix x = random_matrix(60, 5, 31);
  std::vector<double> target(x.rows);
  Rng tr(32);
  for (auto& t : target) t = tr.bernoulli(0.5) ? 1.0 : 0.0;

  Rng pr(33);
  for (int point = 0; point < 10; ++point) {
    std::vector<double> coeffs(6);
    for (auto& c : coeffs) c = pr.uniform(-1.0, 1.0);
    std::vector<double> grad(6);
    kernels::serial::logistic_loss_grad(x, target,
                                        std::span<const double>(coeffs).first(5),
                                        coeffs[5], grad);
    const double h = 1e-6;
    for (std::size_t j = 0; j < 6; ++j) {
      auto probe = coeffs;
      probe[j] = coeffs[j] + h;
      std::vector<double> scratch(6);
      const double up = kernels::serial::logistic_loss_grad(
          x, target, std::span<const double>(probe).first(5), probe[5], scratch);
      probe[j] = coeffs[j] - h;
      const double down = kernels::serial::logistic_loss_grad(
          x, target, std::span<const double>(probe).first(5), probe[5], scratch);
      const double fd = (up - down) / (2.0 * h);
      CHECK(grad[j] == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("shape mismatches are rejected") {
  const Matrix m = random_matrix(4, 3, 41);
  const std::vector<double> bad(2, 0.0);
  std::vector<double> out(4);
  CHECK_THROWS_AS(kernels::serial::row_correlations(m, bad, out.data()),
                  std::invalid_argument);
  const std::vector<double> u(3, 0.0), w(3, 1.0);
  CHECK_THROWS_AS(kernels::serial::correlation_weighted_sum(m, u, w),
                  std::invalid_argument);
}

}  // TEST_SUITE
