#ifndef QPDLAB_ENDPOINT_HPP
#define QPDLAB_ENDPOINT_HPP

#include <cstddef>
#include <functional>
#include <span>

namespace qpdlab {

/// What a deployed model reveals per query.
enum class ResponseKind {
  probability,   // raw confidence f(x)
  label,         // thresholded label, 1 iff f(x) >= 0.5
  label_sample,  // label drawn as Bernoulli(f(x))
};

/// The attacker-facing query API. Implementations wrap a model directly or
/// add perturbation / monitoring on top.
class QueryEndpoint {
 public:
  virtual ~QueryEndpoint() = default;
  virtual double submit(std::span<const double> q) = 0;
  virtual std::size_t dimension() const = 0;
  std::size_t queries_answered() const { return answered_; }

 protected:
  void count_query() { ++answered_; }

 private:
  std::size_t answered_ = 0;
};

using PredictFn = std::function<double(std::span<const double>)>;

}  // namespace qpdlab

#endif
