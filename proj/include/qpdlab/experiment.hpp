#ifndef QPDLAB_EXPERIMENT_HPP
#define QPDLAB_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qpdlab/dataset.hpp"
#include "qpdlab/endpoint.hpp"
#include "qpdlab/models.hpp"

namespace qpdlab {

enum class DefenseSpecKind {
  none,
  rounding,
  bdpl_fixed,
  mdp_laplace,
  mdp_gaussian,
  mdp_bdpl,
  monitor_only,  // unperturbed responses behind the Monitor
  apba_curve,    // fig-parabola: allocation curve, no queries
};

std::string to_string(DefenseSpecKind k);
DefenseSpecKind defense_from_string(const std::string& s);

struct DatasetSource {
  bool synthetic = true;
  std::string csv_path;
  std::string schema_path;
  std::size_t n_dims = 5;
  std::size_t m = 400;
  std::vector<double> coeffs;  // empty: derived from the seed
  double intercept = 0.3;
};

struct ExperimentConfig {
  std::string id = "custom";
  DatasetSource data;
  std::string model_kind = "logistic";  // logistic | nn
  std::vector<DefenseSpecKind> defenses{DefenseSpecKind::none};
  std::string attack = "qpd-linear";  // qpd-linear | qpd-shadow
  std::vector<long long> r_values;    // empty: adaptive duplication
  std::vector<double> epsilon_values{1.0};
  std::vector<double> alpha_values{1.0};
  std::vector<std::uint64_t> seeds{1, 2, 3};
  double ci_threshold = 0.05;
  long long r_cap = 1LL << 14;
  double delta_zone = 0.125;
  bool strict_alg1 = false;
  bool fixed_p = false;
  bool clamp = false;
  bool timing = false;  // write measured wall_time into the CSV
  std::size_t benign_queries = 2000;  // utility presets
  ResponseKind response = ResponseKind::probability;
  TrainConfig train;

  void validate() const;
  static ExperimentConfig preset(const std::string& name);
  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_json_file(const std::string& path);
  static std::vector<std::string> preset_names();
};

struct ResultRow {
  std::string experiment_id;
  std::string dataset;
  std::string defense;
  std::string attack;
  long long r = 0;
  double epsilon = 0.0;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  double r_test = 0.0;
  double extraction_status = 0.0;
  double warning_estimate = 0.0;
  double epsilon_spent = 0.0;
  long long queries_sent = 0;
  double wall_time = 0.0;
  std::string status = "ok";
};

bool any_failed(const std::vector<ResultRow>& rows);

/// Runs the configured sweep: for every (defense, epsilon, alpha, r, seed)
/// point, train the target, wrap it, run the attack, evaluate. Component
/// errors mark the row failed and the run continues.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

/// Progressive duplication sweep comparing the Monitor estimate and the
/// surrogate-tree Warning estimate against the extraction truth on one
/// query stream per seed.
std::vector<ResultRow> monitor_vs_warning(const ExperimentConfig& cfg);

std::string results_to_csv(const std::vector<ResultRow>& rows, bool timing);
std::string summary_to_json(const std::vector<ResultRow>& rows);

/// Writes <base>.csv and <base>.summary.json.
void emit_results(const std::vector<ResultRow>& rows, const std::string& base_path,
                  bool timing);

}  // namespace qpdlab

#endif
