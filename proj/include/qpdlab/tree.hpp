#ifndef QPDLAB_TREE_HPP
#define QPDLAB_TREE_HPP

#include <span>
#include <vector>

#include "qpdlab/matrix.hpp"

namespace qpdlab {

/// Plain CART classifier (Gini splits, binary labels) used as the surrogate
/// in the warning baseline. Split search is deterministic: features are
/// scanned in order and thresholds at midpoints of consecutive sorted values.
class DecisionTree {
 public:
  static DecisionTree fit(const Matrix& x, const std::vector<int>& y, int max_depth);

  int predict(std::span<const double> x) const;
  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    int feature = -1;       // -1 marks a leaf
    double threshold = 0.0; // go left when x[feature] < threshold
    int left = -1;
    int right = -1;
    int label = 0;
  };

  int build(const Matrix& x, const std::vector<int>& y, std::vector<std::size_t>& idx,
            int depth, int max_depth);

  std::vector<Node> nodes_;
};

}  // namespace qpdlab

#endif
