#include <doctest.h>

#include <cmath>

#include "qpdlab/dataset.hpp"
#include "qpdlab/metrics.hpp"
#include "qpdlab/models.hpp"
#include "qpdlab/rng.hpp"

using namespace qpdlab;

namespace {

Dataset separable_1d(std::size_t m) {
  Matrix x(m, 1);
  std::vector<int> y(m);
  Rng rng(404);
  for (std::size_t i = 0; i < m; ++i) {
    double v = rng.uniform(-1.0, 1.0);
    if (std::abs(v) < 0.05) v = v < 0 ? -0.05 : 0.05;
    x(i, 0) = v;
    y[i] = v > 0 ? 1 : 0;
  }
  return Dataset::from_matrix(std::move(x), std::move(y));
}

Dataset xor_dataset(std::size_t m) {
  Matrix x(m, 2);
  std::vector<int> y(m);
  Rng rng(505);
  for (std::size_t i = 0; i < m; ++i) {
    double a = rng.uniform(-1.0, 1.0);
    double b = rng.uniform(-1.0, 1.0);
    if (std::abs(a) < 0.1) a = a < 0 ? -0.1 : 0.1;
    if (std::abs(b) < 0.1) b = b < 0 ? -0.1 : 0.1;
    x(i, 0) = a;
    x(i, 1) = b;
    y[i] = (a > 0) != (b > 0) ? 1 : 0;
  }
  return Dataset::from_matrix(std::move(x), std::move(y));
}

}  // namespace

TEST_SUITE("models") {

TEST_CASE("sigmoid predictions at fixed points") {
  LogisticModel zero;
  zero.a = {0.0};
  zero.b = 0.0;
  CHECK(predict_prob(zero, std::vector<double>{0.7}) == doctest::Approx(0.5));

  LogisticModel m;
  m.a = {2.0};
  m.b = 3.0;
  CHECK(predict_prob(m, std::vector<double>{0.0}) ==
        doctest::Approx(0.9525741268).epsilon(1e-9));
  CHECK(predict_prob(m, std::vector<double>{-1.5}) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(logit(m, std::vector<double>{1.0}) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(logit(zero, std::vector<double>{0.3}) == doctest::Approx(0.0));
}

TEST_CASE("logit inverts predict_prob") {
  LogisticModel m;
  m.a = {1.3, -0.4};
  m.b = 0.6;
  const std::vector<double> x{0.2, -0.7};
  const double p = predict_prob(m, x);
  CHECK(std::log(p / (1.0 - p)) == doctest::Approx(logit(m, x)).epsilon(1e-9));
}

TEST_CASE("dimension mismatch throws") {
  LogisticModel m;
  m.a = {1.0, 2.0};
  CHECK_THROWS_AS(predict_prob(m, std::vector<double>{1.0}), std::invalid_argument);
  NeuralModel nn;
  nn.w1 = Matrix(2, 3);
  nn.b1 = {0, 0, 0};
  nn.w2 = {0, 0, 0};
  CHECK_THROWS_AS(predict_prob(nn, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("separable data trains to positive slope and full accuracy") {
  const Dataset d = separable_1d(80);
  const LogisticModel m = train_logistic(d, {0.5, 2000, 8, 0});
  CHECK(m.a[0] > 0.0);
  CHECK(accuracy(predictor(m), d) == doctest::Approx(1.0));
}

TEST_CASE("training configuration is validated") {
  const Dataset d = separable_1d(40);
  CHECK_THROWS_AS(train_logistic(d, {0.1, 0, 8, 0}), std::invalid_argument);
  CHECK_THROWS_AS(train_logistic(d, {-0.1, 100, 8, 0}), std::invalid_argument);

  Matrix x(6, 1);
  const Dataset single = Dataset::from_matrix(std::move(x), std::vector<int>(6, 1));
  CHECK_THROWS_AS(train_logistic(single, {0.1, 10, 8, 0}), std::invalid_argument);
}

TEST_CASE("generative recovery within tolerance") {
  const std::vector<double> a{2.0};
  const Dataset d = synthesize(1, 100, a, 3.0, 9);
  TrainConfig cfg;
  cfg.learning_rate = 0.5;
  cfg.epochs = 20000;
  const LogisticModel m = train_logistic(d, cfg);
  CHECK(m.a[0] == doctest::Approx(2.0).epsilon(0.1));
  CHECK(m.b == doctest::Approx(3.0).epsilon(0.1));
}

TEST_CASE("loss is monotone non-increasing at small learning rate") {
  const Dataset d = synthesize(3, 120, std::vector<double>{1.0, -1.0, 0.5}, 0.2, 11);
  std::vector<double> trace;
  train_logistic(d, {0.01, 400, 8, 0}, &trace);
  REQUIRE(trace.size() == 400);
  for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-12);

  std::vector<double> nn_trace;
  train_nn(d, {0.01, 300, 4, 1}, &nn_trace);
  for (std::size_t i = 1; i < nn_trace.size(); ++i)
    CHECK(nn_trace[i] <= nn_trace[i - 1] + 1e-12);
}

TEST_CASE("nn learns xor") {
  const Dataset d = xor_dataset(200);
  TrainConfig cfg;
  cfg.learning_rate = 2.0;
  cfg.epochs = 8000;
  cfg.hidden_units = 4;
  cfg.seed = 1;
  const NeuralModel m = train_nn(d, cfg);
  CHECK(accuracy(predictor(m), d) >= 0.95);
}

TEST_CASE("nn with one hidden unit handles separable data") {
  const Dataset d = separable_1d(80);
  TrainConfig cfg;
  cfg.learning_rate = 1.0;
  cfg.epochs = 4000;
  cfg.hidden_units = 1;
  cfg.seed = 3;
  const NeuralModel m = train_nn(d, cfg);
  CHECK(accuracy(predictor(m), d) >= 0.95);
}

TEST_CASE("same seed gives bit-identical weights") {
  const Dataset d = xor_dataset(60);
  TrainConfig cfg;
  cfg.learning_rate = 1.0;
  cfg.epochs = 50;
  cfg.hidden_units = 4;
  cfg.seed = 7;
  const NeuralModel m1 = train_nn(d, cfg);
  const NeuralModel m2 = train_nn(d, cfg);
  CHECK(m1.w1.data == m2.w1.data);
  CHECK(m1.b1 == m2.b1);
  CHECK(m1.w2 == m2.w2);
  CHECK(m1.b2 == m2.b2);
}

TEST_CASE("nn gradient matches central finite differences") {
  const Dataset d = xor_dataset(40);
  std::vector<double> target(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) target[i] = static_cast<double>(d.y[i]);

  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.hidden_units = 3;
  Rng rng(77);
  for (int point = 0; point < 10; ++point) {
    NeuralModel m;
    m.w1 = Matrix(2, 3);
    for (auto& v : m.w1.data) v = rng.uniform(-1.0, 1.0);
    m.b1 = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    m.w2 = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    m.b2 = rng.uniform(-1, 1);

    NeuralModel grad;
    nn_loss_grad(m, d.x, target, &grad);

    const double h = 1e-6;
    auto loss_at = [&](NeuralModel probe) { return nn_loss_grad(probe, d.x, target, nullptr); };
    // check one w1 entry, one b1, one w2, and b2
    {
      NeuralModel up = m, down = m;
      up.w1(1, 2) += h;
      down.w1(1, 2) -= h;
      CHECK(grad.w1(1, 2) ==
            doctest::Approx((loss_at(up) - loss_at(down)) / (2 * h)).epsilon(1e-5));
    }
    {
      NeuralModel up = m, down = m;
      up.b1[1] += h;
      down.b1[1] -= h;
      CHECK(grad.b1[1] ==
            doctest::Approx((loss_at(up) - loss_at(down)) / (2 * h)).epsilon(1e-5));
    }
    {
      NeuralModel up = m, down = m;
      up.w2[0] += h;
      down.w2[0] -= h;
      CHECK(grad.w2[0] ==
            doctest::Approx((loss_at(up) - loss_at(down)) / (2 * h)).epsilon(1e-5));
    }
    {
      NeuralModel up = m, down = m;
      up.b2 += h;
      down.b2 -= h;
      CHECK(grad.b2 ==
            doctest::Approx((loss_at(up) - loss_at(down)) / (2 * h)).epsilon(1e-5));
    }
  }
}

TEST_CASE("json round-trips both model kinds") {
  LogisticModel lm;
  lm.a = {0.1, -2.5, 3.25};
  lm.b = -0.75;
  const LogisticModel lm2 = logistic_from_json(to_json(lm));
  CHECK(lm2.a == lm.a);
  CHECK(lm2.b == lm.b);

  NeuralModel nn;
  nn.w1 = Matrix::from_rows({{0.25, -1.0}, {2.0, 0.5}});
  nn.b1 = {0.125, -0.5};
  nn.w2 = {1.5, -2.25};
  nn.b2 = 0.375;
  const NeuralModel nn2 = nn_from_json(to_json(nn));
  CHECK(nn2.w1.data == nn.w1.data);
  CHECK(nn2.b1 == nn.b1);
  CHECK(nn2.w2 == nn.w2);
  CHECK(nn2.b2 == nn.b2);

  CHECK_THROWS_AS(logistic_from_json(to_json(nn)), std::runtime_error);
}

}  // TEST_SUITE
