#include "qpdlab/metrics.hpp"

#include <stdexcept>
#include <vector>

#include "qpdlab/rng.hpp"

namespace qpdlab {

PredictFn predictor(const LogisticModel& m) {
  return [m](std::span<const double> x) { return predict_prob(m, x); };
}

PredictFn predictor(const NeuralModel& m) {
  return [m](std::span<const double> x) { return predict_prob(m, x); };
}

double accuracy(const PredictFn& model, const Dataset& d) {
  if (d.size() == 0) throw std::invalid_argument("accuracy: empty dataset");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < d.size(); ++i)
    correct += label_of(model(d.x.row_span(i))) == d.y[i] ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(d.size());
}

double r_test(const PredictFn& original, const PredictFn& extracted,
              const Dataset& d_test) {
  if (d_test.size() == 0) throw std::invalid_argument("r_test: empty dataset");
  std::size_t differ = 0;
  for (std::size_t i = 0; i < d_test.size(); ++i) {
    const auto row = d_test.x.row_span(i);
    differ += label_of(original(row)) != label_of(extracted(row)) ? 1 : 0;
  }
  return static_cast<double>(differ) / static_cast<double>(d_test.size());
}

double r_unif(const PredictFn& original, const PredictFn& extracted, std::size_t n_dims,
              std::size_t n_samples, std::uint64_t seed) {
  if (n_samples < 100) throw std::invalid_argument("r_unif: need at least 100 samples");
  Rng rng(seed);
  std::vector<double> x(n_dims);
  std::size_t differ = 0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    differ += label_of(original(x)) != label_of(extracted(x)) ? 1 : 0;
  }
  return static_cast<double>(differ) / static_cast<double>(n_samples);
}

EvalResult evaluate(const PredictFn& original, const PredictFn& extracted,
                    const Dataset& d_test) {
  EvalResult res;
  res.r_test = r_test(original, extracted, d_test);
  res.one_minus_r_test = 1.0 - res.r_test;
  res.accuracy = accuracy(extracted, d_test);
  res.n_eval = d_test.size();
  return res;
}

}  // namespace qpdlab
