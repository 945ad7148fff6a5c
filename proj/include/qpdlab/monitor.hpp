#ifndef QPDLAB_MONITOR_HPP
#define QPDLAB_MONITOR_HPP

#include <array>
#include <span>
#include <string>
#include <vector>

#include "qpdlab/dataset.hpp"
#include "qpdlab/endpoint.hpp"
#include "qpdlab/matrix.hpp"

namespace qpdlab {

/// Per-tuple information amounts (bits) plus their total.
struct InfoVector {
  std::vector<double> per_tuple;
  double total = 0.0;
};

/// Append-only log of (query || response) rows with the information amount
/// credited to each row at append time.
struct QueryLog {
  Matrix rows;               // each row has length n+1
  std::vector<double> info;  // aligned with rows, floored at 0
};

struct ExtractionStatus {
  std::array<double, 2> per_class{0.0, 0.0};  // leaked / owned, per label
  double overall = 0.0;                       // clipped to [0,1]
  double overall_raw = 0.0;
  bool clipped = false;
  std::array<bool, 2> class_flagged{false, false};  // zero-information class
};

/// Empirical joint entropy (bits) of a discretized matrix, from joint
/// frequency counts over row patterns.
double joint_entropy(const std::vector<std::vector<int>>& discrete_rows);

/// Per-tuple surprisal under per-feature empirical marginals, rescaled so the
/// vector totals the joint entropy of the matrix.
InfoVector per_tuple_info(const std::vector<std::vector<int>>& discrete_rows);

/// Pearson correlation; vectors with zero variance correlate 0 by convention.
double pcc(std::span<const double> u, std::span<const double> v);

/// Defender-side extraction assessment: holds the training-side information
/// vector, the query log, and the accumulated leakage L.
class Monitor {
 public:
  /// Builds the information vector of [X | y] using the dataset's bins.
  explicit Monitor(const Dataset& d);

  std::size_t width() const { return d_rows_.cols; }     // n+1
  double dataset_info_total() const { return d_info_.total; }
  double leakage() const { return leakage_; }
  std::size_t log_size() const { return log_.rows.rows; }
  const QueryLog& log() const { return log_; }

  /// Information amount of a candidate (query || response) against the
  /// current state; does not mutate. May be negative for redundant queries.
  double query_info(std::span<const double> u) const;

  /// Record a served query: computes query_info, appends the row with its
  /// floored information amount, and accumulates leakage. Returns raw I_u.
  double observe(std::span<const double> query, double response);

  ExtractionStatus extraction_status() const;

  /// Surrogate-tree estimate: fidelity of a depth-6 CART fit on the log
  /// against the target on the validation inputs.
  double warning_baseline(PredictFn target, const Dataset& validation) const;

  std::string checkpoint_json() const;
  static Monitor restore(const Dataset& d, const std::string& json_text);

 private:
  Matrix d_rows_;            // m x (n+1), raw values (features || label)
  InfoVector d_info_;
  std::array<double, 2> class_info_{0.0, 0.0};
  std::array<double, 2> class_probs_{0.0, 0.0};
  QueryLog log_;
  double leakage_ = 0.0;
};

}  // namespace qpdlab

#endif
