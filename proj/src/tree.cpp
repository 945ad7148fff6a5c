#include "qpdlab/tree.hpp"

#include <algorithm>
#include <stdexcept>

namespace qpdlab {

namespace {

int majority(const std::vector<int>& y, const std::vector<std::size_t>& idx) {
  std::size_t ones = 0;
  for (std::size_t i : idx) ones += static_cast<std::size_t>(y[i]);
  return 2 * ones >= idx.size() ? 1 : 0;
}

double gini(std::size_t ones, std::size_t total) {
  if (total == 0) return 0.0;
  const double p = static_cast<double>(ones) / static_cast<double>(total);
  return 2.0 * p * (1.0 - p);
}

}  // namespace

DecisionTree DecisionTree::fit(const Matrix& x, const std::vector<int>& y, int max_depth) {
  if (x.rows == 0 || x.rows != y.size())
    throw std::invalid_argument("DecisionTree::fit: empty or mismatched data");
  DecisionTree t;
  std::vector<std::size_t> idx(x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) idx[i] = i;
  t.build(x, y, idx, 0, max_depth);
  return t;
}

int DecisionTree::build(const Matrix& x, const std::vector<int>& y,
                        std::vector<std::size_t>& idx, int depth, int max_depth) {
  const int node_id = static_cast<int>(nodes_.size());
  nodes_.push_back({});
  nodes_[static_cast<std::size_t>(node_id)].label = majority(y, idx);

  std::size_t ones = 0;
  for (std::size_t i : idx) ones += static_cast<std::size_t>(y[i]);
  const bool pure = ones == 0 || ones == idx.size();
  if (pure || depth >= max_depth || idx.size() < 2) return node_id;

  // exhaustive split search; ties keep the earliest (feature, threshold)
  double best_impurity = gini(ones, idx.size());
  int best_feature = -1;
  double best_threshold = 0.0;
  std::vector<std::pair<double, int>> col(idx.size());
  for (std::size_t f = 0; f < x.cols; ++f) {
    for (std::size_t k = 0; k < idx.size(); ++k)
      col[k] = {x(idx[k], f), y[idx[k]]};
    std::sort(col.begin(), col.end());
    std::size_t left_ones = 0;
    for (std::size_t k = 0; k + 1 < col.size(); ++k) {
      left_ones += static_cast<std::size_t>(col[k].second);
      if (col[k].first == col[k + 1].first) continue;
      const std::size_t nl = k + 1, nr = col.size() - nl;
      const double w = (static_cast<double>(nl) * gini(left_ones, nl) +
                        static_cast<double>(nr) * gini(ones - left_ones, nr)) /
                       static_cast<double>(col.size());
      if (w + 1e-12 < best_impurity) {
        best_impurity = w;
        best_feature = static_cast<int>(f);
        best_threshold = 0.5 * (col[k].first + col[k + 1].first);
      }
    }
  }
  if (best_feature < 0) return node_id;

  std::vector<std::size_t> left_idx, right_idx;
  for (std::size_t i : idx) {
    (x(i, static_cast<std::size_t>(best_feature)) < best_threshold ? left_idx : right_idx)
        .push_back(i);
  }
  if (left_idx.empty() || right_idx.empty()) return node_id;

  nodes_[static_cast<std::size_t>(node_id)].feature = best_feature;
  nodes_[static_cast<std::size_t>(node_id)].threshold = best_threshold;
  const int l = build(x, y, left_idx, depth + 1, max_depth);
  nodes_[static_cast<std::size_t>(node_id)].left = l;
  const int r = build(x, y, right_idx, depth + 1, max_depth);
  nodes_[static_cast<std::size_t>(node_id)].right = r;
  return node_id;
}

int DecisionTree::predict(std::span<const double> x) const {
  std::size_t cur = 0;
  while (true) {
    const Node& n = nodes_[cur];
    if (n.feature < 0) return n.label;
    cur = static_cast<std::size_t>(
        x[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right);
  }
}

}  // namespace qpdlab
