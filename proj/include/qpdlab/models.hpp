#ifndef QPDLAB_MODELS_HPP
#define QPDLAB_MODELS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qpdlab/dataset.hpp"
#include "qpdlab/matrix.hpp"

namespace qpdlab {

struct TrainConfig {
  double learning_rate = 0.1;
  int epochs = 2000;
  int hidden_units = 8;  // NN only
  std::uint64_t seed = 0;
};

/// f(x) = sigmoid(a.x + b)
struct LogisticModel {
  std::vector<double> a;
  double b = 0.0;

  std::size_t dim() const { return a.size(); }
};

/// One hidden layer, sigmoid activations throughout.
/// hidden = sigmoid(w1^T x + b1); output = sigmoid(w2.hidden + b2)
struct NeuralModel {
  Matrix w1;  // n x h
  std::vector<double> b1;
  std::vector<double> w2;
  double b2 = 0.0;

  std::size_t dim() const { return w1.rows; }
  std::size_t hidden() const { return b1.size(); }
};

double sigmoid(double t);

double predict_prob(const LogisticModel& m, std::span<const double> x);
double predict_prob(const NeuralModel& m, std::span<const double> x);

/// Linear pre-activation a.x + b (what the equation-solving attack recovers).
double logit(const LogisticModel& m, std::span<const double> x);

/// Label with the 0.5 threshold; exact ties classify as 1.
inline int label_of(double prob) { return prob >= 0.5 ? 1 : 0; }

/// Full-batch gradient-descent fits on arbitrary real targets in [0,1]
/// (hard labels or averaged responses). loss_trace, when given, receives the
/// mean cross-entropy after each epoch.
LogisticModel fit_logistic(const Matrix& x, std::span<const double> target,
                           const TrainConfig& cfg,
                           std::vector<double>* loss_trace = nullptr);
NeuralModel fit_nn(const Matrix& x, std::span<const double> target,
                   const TrainConfig& cfg, std::vector<double>* loss_trace = nullptr);

/// Dataset-facing trainers; require both classes present.
LogisticModel train_logistic(const Dataset& train, const TrainConfig& cfg,
                             std::vector<double>* loss_trace = nullptr);
NeuralModel train_nn(const Dataset& train, const TrainConfig& cfg,
                     std::vector<double>* loss_trace = nullptr);

/// Mean cross-entropy loss and gradient of the NN; used by fit_nn and the
/// finite-difference tests. grad must have the same shape as m.
double nn_loss_grad(const NeuralModel& m, const Matrix& x,
                    std::span<const double> target, NeuralModel* grad);

std::string to_json(const LogisticModel& m);
std::string to_json(const NeuralModel& m);
/// Parses either model kind; throws on the other loader.
LogisticModel logistic_from_json(const std::string& text);
NeuralModel nn_from_json(const std::string& text);
void save_model_json(const std::string& path, const std::string& json_text);
std::string load_text_file(const std::string& path);

}  // namespace qpdlab

#endif
