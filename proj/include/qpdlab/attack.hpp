#ifndef QPDLAB_ATTACK_HPP
#define QPDLAB_ATTACK_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qpdlab/endpoint.hpp"
#include "qpdlab/matrix.hpp"
#include "qpdlab/models.hpp"

namespace qpdlab {

/// n+1 linearly independent queries for an n-dimensional linear target.
/// The system solved is [Q | 1] [a; b] = z, so independence means the
/// ones-augmented square matrix is nonsingular.
struct QueryMatrix {
  Matrix q;  // (n+1) x n
  std::size_t n = 0;
};

/// Per-query response lists collected by flooding: samples[j] holds the r
/// responses for query j.
struct DuplicatedResponses {
  std::vector<std::vector<double>> samples;
  long long r = 0;
};

enum class NoiseFamily { laplace, gaussian };

struct NoiseFamilyResult {
  NoiseFamily family = NoiseFamily::gaussian;
  bool degenerate = false;  // constant samples
  double ks_laplace = 0.0;
  double ks_gaussian = 0.0;
};

struct CIResult {
  NoiseFamily family = NoiseFamily::gaussian;
  double lower = 0.0;
  double upper = 0.0;
  double length() const { return upper - lower; }
};

struct ExtractedModel {
  std::vector<double> a;
  double b = 0.0;
  enum class Kind { linear_solve, shadow } kind = Kind::linear_solve;
  long long queries_used = 0;  // r * (n+1) for linear solves
  long long r = 0;
  bool capped = false;  // duplication cap hit before the CI threshold

  LogisticModel as_logistic() const { return LogisticModel{a, b}; }
};

struct AttackOptions {
  double ci_threshold = 0.05;
  long long r_cap = 1LL << 20;
  bool strict_alg1 = false;  // re-send the full flood each round instead of
                             // reusing earlier responses
  std::uint64_t seed = 0;
  /// Skip the adaptive search and flood exactly this many copies per query.
  std::optional<long long> fixed_r;
  /// When the target is a label-flipping mechanism with known keep
  /// probability k, de-bias averaged labels via (z - (1-k)) / (2k - 1).
  std::optional<double> debias_keep_prob;
  /// Override the shadow attack's query count (default 20 * (n+1)).
  std::optional<std::size_t> shadow_queries;
};

/// Rows sampled uniformly in [-1,1]^n, resampled until the ones-augmented
/// determinant is comfortably nonsingular.
QueryMatrix build_query_matrix(std::size_t n, std::uint64_t seed);

/// Decide whether centered samples look Laplace or Gaussian: center at the
/// sample median, fit each family's scale by MLE, pick the smaller
/// Kolmogorov-Smirnov statistic. Needs at least 8 samples.
NoiseFamilyResult hypothesis_test_noise(std::span<const double> samples);

/// 95% CI for the location of Laplace samples, built from the median and the
/// mean absolute deviation with a simulation-calibrated pivot quantile.
CIResult ci_laplace(std::span<const double> samples);
/// 95% CI for the mean of Gaussian samples: mean +- 1.96 s/sqrt(n).
CIResult ci_gaussian(std::span<const double> samples);
/// Hypothesis-test then the matching CI; fewer than 8 samples fall back to
/// the Gaussian interval.
CIResult ci_for_samples(std::span<const double> samples);

struct FindROutcome {
  long long r = 0;
  DuplicatedResponses responses;
  bool capped = false;
  std::size_t queries_sent = 0;
  double max_ci_length = 0.0;
};

/// Algorithm: start at r=2 and double until every per-query 95% CI is no
/// longer than ci_threshold. Responses accumulate across rounds unless
/// strict_alg1 re-floods from scratch.
FindROutcome find_optimal_r(QueryEndpoint& api, const Matrix& queries,
                            const AttackOptions& opts);

/// Law-of-large-numbers estimate: per-query mean of the duplicated responses.
std::vector<double> denoise(const DuplicatedResponses& responses);

/// Cramer's rule on the ones-augmented system [Q | 1][a; b] = z, with a
/// Gaussian-elimination cross-check of the same system.
ExtractedModel solve_cramer(const QueryMatrix& q, std::span<const double> z);

/// Full pipeline against a logistic (or any sigmoid-linear) target:
/// build queries, flood adaptively, average, invert the sigmoid, solve.
ExtractedModel attack_logistic(QueryEndpoint& api, std::size_t n,
                               const AttackOptions& opts);

struct ShadowResult {
  NeuralModel model;
  long long r = 0;
  std::size_t queries_used = 0;
  bool capped = false;
};

/// Shadow-model attack for nonlinear targets: flood s = 20(n+1) uniform
/// queries adaptively, average the responses, fit a substitute network.
ShadowResult attack_shadow(QueryEndpoint& api, std::size_t n, const AttackOptions& opts,
                           const TrainConfig& shadow_cfg);

}  // namespace qpdlab

#endif
