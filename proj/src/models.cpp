#include "qpdlab/models.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qpdlab/kernels.hpp"
#include "qpdlab/rng.hpp"

#include <json.hpp>

namespace qpdlab {

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

namespace {

void check_dim(std::size_t expected, std::size_t got) {
  if (expected != got)
    throw std::invalid_argument("predict: input has dimension " + std::to_string(got) +
                                ", model expects " + std::to_string(expected));
}

void check_config(const TrainConfig& cfg) {
  if (cfg.learning_rate <= 0.0)
    throw std::invalid_argument("train: learning_rate must be positive");
  if (cfg.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
}

std::vector<double> labels_as_targets(const Dataset& d) {
  std::vector<double> t(d.size());
  bool has0 = false, has1 = false;
  for (std::size_t i = 0; i < d.size(); ++i) {
    t[i] = static_cast<double>(d.y[i]);
    (d.y[i] ? has1 : has0) = true;
  }
  if (d.size() == 0 || !has0 || !has1)
    throw std::invalid_argument("train: training set must contain both classes");
  return t;
}

constexpr double kLogEps = 1e-12;

double xent(double p, double y) {
  return -(y * std::log(std::max(p, kLogEps)) +
           (1.0 - y) * std::log(std::max(1.0 - p, kLogEps)));
}

}  // namespace

double predict_prob(const LogisticModel& m, std::span<const double> x) {
  return sigmoid(logit(m, x));
}

double logit(const LogisticModel& m, std::span<const double> x) {
  check_dim(m.a.size(), x.size());
  double t = m.b;
  for (std::size_t j = 0; j < x.size(); ++j) t += m.a[j] * x[j];
  return t;
}

double predict_prob(const NeuralModel& m, std::span<const double> x) {
  check_dim(m.w1.rows, x.size());
  const std::size_t h = m.hidden();
  double out = m.b2;
  for (std::size_t k = 0; k < h; ++k) {
    double t = m.b1[k];
    for (std::size_t j = 0; j < x.size(); ++j) t += m.w1(j, k) * x[j];
    out += m.w2[k] * sigmoid(t);
  }
  return sigmoid(out);
}

LogisticModel fit_logistic(const Matrix& x, std::span<const double> target,
                           const TrainConfig& cfg, std::vector<double>* loss_trace) {
  check_config(cfg);
  if (x.rows == 0) throw std::invalid_argument("train: empty training set");
  const std::size_t n = x.cols;
  LogisticModel m;
  m.a.assign(n, 0.0);
  m.b = 0.0;
  std::vector<double> coeffs(n + 1, 0.0);
  std::vector<double> grad(n + 1, 0.0);
  if (loss_trace) loss_trace->clear();
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double loss =
        kernels::logistic_loss_grad(x, target, std::span<const double>(coeffs).first(n),
                                    coeffs[n], grad);
    for (std::size_t j = 0; j <= n; ++j) coeffs[j] -= cfg.learning_rate * grad[j];
    if (loss_trace) loss_trace->push_back(loss);
  }
  m.a.assign(coeffs.begin(), coeffs.begin() + static_cast<std::ptrdiff_t>(n));
  m.b = coeffs[n];
  return m;
}

double nn_loss_grad(const NeuralModel& m, const Matrix& x,
                    std::span<const double> target, NeuralModel* grad) {
  const std::size_t n = m.w1.rows, h = m.hidden(), rows = x.rows;
  if (x.cols != n || target.size() != rows)
    throw std::invalid_argument("nn_loss_grad: shape mismatch");
  if (grad) {
    grad->w1 = Matrix(n, h, 0.0);
    grad->b1.assign(h, 0.0);
    grad->w2.assign(h, 0.0);
    grad->b2 = 0.0;
  }
  double loss = 0.0;
  std::vector<double> hidden(h);
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = x.row(i);
    double out_t = m.b2;
    for (std::size_t k = 0; k < h; ++k) {
      double t = m.b1[k];
      for (std::size_t j = 0; j < n; ++j) t += m.w1(j, k) * row[j];
      hidden[k] = sigmoid(t);
      out_t += m.w2[k] * hidden[k];
    }
    const double p = sigmoid(out_t);
    const double y = target[i];
    loss += xent(p, y);
    if (!grad) continue;
    const double dout = p - y;  // d loss / d out_t
    grad->b2 += dout;
    for (std::size_t k = 0; k < h; ++k) {
      grad->w2[k] += dout * hidden[k];
      const double dhid = dout * m.w2[k] * hidden[k] * (1.0 - hidden[k]);
      grad->b1[k] += dhid;
      for (std::size_t j = 0; j < n; ++j) grad->w1(j, k) += dhid * row[j];
    }
  }
  const double inv_m = 1.0 / static_cast<double>(rows);
  if (grad) {
    for (auto& v : grad->w1.data) v *= inv_m;
    for (auto& v : grad->b1) v *= inv_m;
    for (auto& v : grad->w2) v *= inv_m;
    grad->b2 *= inv_m;
  }
  return loss * inv_m;
}

NeuralModel fit_nn(const Matrix& x, std::span<const double> target,
                   const TrainConfig& cfg, std::vector<double>* loss_trace) {
  check_config(cfg);
  if (cfg.hidden_units < 1) throw std::invalid_argument("train: hidden_units must be >= 1");
  if (x.rows == 0) throw std::invalid_argument("train: empty training set");
  const std::size_t n = x.cols;
  const std::size_t h = static_cast<std::size_t>(cfg.hidden_units);

  Rng rng(cfg.seed);
  NeuralModel m;
  m.w1 = Matrix(n, h);
  for (auto& v : m.w1.data) v = rng.uniform(-0.5, 0.5);
  m.b1.resize(h);
  for (auto& v : m.b1) v = rng.uniform(-0.5, 0.5);
  m.w2.resize(h);
  for (auto& v : m.w2) v = rng.uniform(-0.5, 0.5);
  m.b2 = rng.uniform(-0.5, 0.5);

  if (loss_trace) loss_trace->clear();
  NeuralModel grad;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double loss = nn_loss_grad(m, x, target, &grad);
    const double lr = cfg.learning_rate;
    for (std::size_t i = 0; i < m.w1.data.size(); ++i) m.w1.data[i] -= lr * grad.w1.data[i];
    for (std::size_t k = 0; k < h; ++k) {
      m.b1[k] -= lr * grad.b1[k];
      m.w2[k] -= lr * grad.w2[k];
    }
    m.b2 -= lr * grad.b2;
    if (loss_trace) loss_trace->push_back(loss);
  }
  return m;
}

LogisticModel train_logistic(const Dataset& train, const TrainConfig& cfg,
                             std::vector<double>* loss_trace) {
  const auto targets = labels_as_targets(train);
  return fit_logistic(train.x, targets, cfg, loss_trace);
}

NeuralModel train_nn(const Dataset& train, const TrainConfig& cfg,
                     std::vector<double>* loss_trace) {
  const auto targets = labels_as_targets(train);
  return fit_nn(train.x, targets, cfg, loss_trace);
}

std::string to_json(const LogisticModel& m) {
  nlohmann::json j;
  j["kind"] = "logistic";
  j["a"] = m.a;
  j["b"] = m.b;
  return j.dump(2);
}

std::string to_json(const NeuralModel& m) {
  nlohmann::json j;
  j["kind"] = "nn";
  std::vector<std::vector<double>> w1(m.w1.rows, std::vector<double>(m.w1.cols));
  for (std::size_t i = 0; i < m.w1.rows; ++i)
    for (std::size_t k = 0; k < m.w1.cols; ++k) w1[i][k] = m.w1(i, k);
  j["W1"] = w1;
  j["b1"] = m.b1;
  j["W2"] = m.w2;
  j["b2"] = m.b2;
  return j.dump(2);
}

LogisticModel logistic_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (j.value("kind", "logistic") != "logistic")
    throw std::runtime_error("model: expected a logistic model");
  LogisticModel m;
  m.a = j.at("a").get<std::vector<double>>();
  m.b = j.at("b").get<double>();
  return m;
}

NeuralModel nn_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (j.value("kind", "nn") != "nn") throw std::runtime_error("model: expected an nn model");
  NeuralModel m;
  const auto w1 = j.at("W1").get<std::vector<std::vector<double>>>();
  if (w1.empty()) throw std::runtime_error("model: empty W1");
  m.w1 = Matrix(w1.size(), w1.front().size());
  for (std::size_t i = 0; i < w1.size(); ++i)
    for (std::size_t k = 0; k < w1[i].size(); ++k) m.w1(i, k) = w1[i][k];
  m.b1 = j.at("b1").get<std::vector<double>>();
  m.w2 = j.at("W2").get<std::vector<double>>();
  m.b2 = j.at("b2").get<double>();
  return m;
}

void save_model_json(const std::string& path, const std::string& json_text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("model: cannot write " + path);
  out << json_text << "\n";
}

std::string load_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace qpdlab
