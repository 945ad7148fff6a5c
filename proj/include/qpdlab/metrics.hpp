#ifndef QPDLAB_METRICS_HPP
#define QPDLAB_METRICS_HPP

#include <cstdint>
#include <optional>

#include "qpdlab/dataset.hpp"
#include "qpdlab/endpoint.hpp"
#include "qpdlab/models.hpp"

namespace qpdlab {

struct EvalResult {
  double accuracy = 0.0;
  double r_test = 0.0;
  double one_minus_r_test = 1.0;
  std::optional<double> r_unif;
  std::size_t n_eval = 0;
};

PredictFn predictor(const LogisticModel& m);
PredictFn predictor(const NeuralModel& m);

/// Fraction of correct labels (0.5 threshold, ties classify as 1).
double accuracy(const PredictFn& model, const Dataset& d);

/// Label-disagreement rate between two models on the test inputs.
double r_test(const PredictFn& original, const PredictFn& extracted, const Dataset& d_test);

/// Disagreement rate on uniform samples in [-1,1]^n.
double r_unif(const PredictFn& original, const PredictFn& extracted, std::size_t n_dims,
              std::size_t n_samples, std::uint64_t seed);

EvalResult evaluate(const PredictFn& original, const PredictFn& extracted,
                    const Dataset& d_test);

}  // namespace qpdlab

#endif
