#ifndef QPDLAB_DATASET_HPP
#define QPDLAB_DATASET_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qpdlab/matrix.hpp"

namespace qpdlab {

enum class ColumnKind { numeric, categorical };

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
};

/// Column layout of a CSV source. Parsed from the JSON config
/// {"columns":[{"name":...,"kind":"numeric"|"categorical"}],"label":...}.
struct Schema {
  std::vector<ColumnSpec> columns;
  std::string label_column;

  static Schema from_json_text(const std::string& text);
  static Schema from_json_file(const std::string& path);
  std::size_t label_index() const;
};

struct RawCell {
  bool missing = false;
  std::string text;
};

/// Parsed but un-encoded rows; missing cells are flagged, never dropped.
struct RawDataset {
  Schema schema;
  std::vector<std::vector<RawCell>> rows;

  std::size_t missing_count() const;
};

/// Generating logistic coefficients of a synthetic dataset, kept so tests
/// can check recovery against the truth.
struct GroundTruth {
  std::vector<double> a;
  double b = 0.0;
};

/// Encoded dataset: one-hot expanded, imputed, label in {0,1}.
struct Dataset {
  Matrix x;
  std::vector<int> y;
  std::vector<std::string> feature_names;
  std::array<double, 2> class_probs{0.0, 0.0};
  /// Per-feature bin edges used for entropy estimation; numeric features get
  /// 10 equal-width bins over the observed range, binary features 2 bins.
  std::vector<std::vector<double>> feature_bins;
  /// [first_column, count] of each one-hot group (for invariant checks).
  std::vector<std::pair<std::size_t, std::size_t>> onehot_groups;
  std::optional<GroundTruth> truth;

  std::size_t size() const { return x.rows; }
  std::size_t dim() const { return x.cols; }

  /// Bin index of value v in feature column j; out-of-range clamps to the
  /// edge bins.
  int discretize(std::size_t j, double v) const;
  int bin_count(std::size_t j) const;

  /// Rebuilds class_probs and feature_bins from the current x/y.
  void refresh_stats();

  static Dataset from_matrix(Matrix x, std::vector<int> y);
};

struct SplitDataset {
  Dataset train;
  Dataset test;
  std::uint64_t seed = 0;
};

constexpr int kNumericBins = 10;

/// Parse a CSV file (header row, comma delimiter, empty cell = missing).
RawDataset load_csv(const std::string& path, const Schema& schema);
RawDataset parse_csv_text(const std::string& text, const Schema& schema);

/// One-hot encode categoricals, impute (mean / mode), map labels to {0,1}.
Dataset preprocess(const RawDataset& raw);

/// Deterministic shuffled 70/30 split. Requires at least 10 rows.
SplitDataset split(const Dataset& d, std::uint64_t seed);

/// Synthetic dataset: features uniform in [-1,1], labels Bernoulli from a
/// ground-truth logistic model (coeffs a, intercept b).
Dataset synthesize(std::size_t n_dims, std::size_t m, std::span<const double> a,
                   double b, std::uint64_t seed);

}  // namespace qpdlab

#endif
