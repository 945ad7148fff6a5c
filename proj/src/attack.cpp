#include "qpdlab/attack.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qpdlab/linalg.hpp"
#include "qpdlab/rng.hpp"

namespace qpdlab {

namespace {

constexpr double kZ975 = 1.96;           // standard normal 0.975 quantile
constexpr double kDetFloor = 1e-9;       // query-matrix independence margin
constexpr double kSingularFloor = 1e-12;

// 0.975 quantile of |median - mu| / (mad / sqrt(n)) for n iid Laplace
// samples, estimated from 5e5 simulations per n. The pivot is location-scale
// free, so the table applies to any Laplace data. Converges to the normal
// quantile 1.96 as n grows.
struct PivotEntry { double log2n; double q; };
constexpr PivotEntry kLaplacePivotTable[] = {
    {1.000000, 14.1968},  // n=2
    {1.584963, 5.7280},   // n=3
    {2.000000, 3.9982},   // n=4
    {2.584963, 3.2378},   // n=6
    {3.000000, 2.9476},   // n=8
    {3.584963, 2.6865},   // n=12
    {4.000000, 2.5544},   // n=16
    {4.584963, 2.4134},   // n=24
    {5.000000, 2.3457},   // n=32
    {5.584963, 2.2645},   // n=48
    {6.000000, 2.2207},   // n=64
    {6.584963, 2.1725},   // n=96
    {7.000000, 2.1326},   // n=128
    {7.584963, 2.0992},   // n=192
    {8.000000, 2.0757},   // n=256
    {8.584963, 2.0631},   // n=384
    {9.000000, 2.0514},   // n=512
    {10.000000, 2.0148},  // n=1024
    {11.000000, 1.9924},  // n=2048
    {12.000000, 1.9851},  // n=4096
};

double laplace_pivot_q975(std::size_t n) {
  const double x = std::log2(static_cast<double>(n));
  const auto* table = kLaplacePivotTable;
  constexpr std::size_t len = std::size(kLaplacePivotTable);
  if (x <= table[0].log2n) return table[0].q;
  if (x >= table[len - 1].log2n) {
    // tail: excess over the normal quantile decays like 1/sqrt(n)
    const double excess = table[len - 1].q - kZ975;
    return kZ975 + excess * std::exp2((table[len - 1].log2n - x) / 2.0);
  }
  for (std::size_t i = 1; i < len; ++i) {
    if (x <= table[i].log2n) {
      const double t = (x - table[i - 1].log2n) / (table[i].log2n - table[i - 1].log2n);
      return table[i - 1].q + t * (table[i].q - table[i - 1].q);
    }
  }
  return kZ975;
}

double median_of(std::vector<double> v) {
  const std::size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n / 2), v.end());
  double hi = v[n / 2];
  if (n % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n / 2 - 1), v.end());
  return 0.5 * (v[n / 2 - 1] + hi);
}

double laplace_cdf(double x, double scale) {
  if (scale <= 0.0) return x < 0.0 ? 0.0 : 1.0;
  return x < 0.0 ? 0.5 * std::exp(x / scale) : 1.0 - 0.5 * std::exp(-x / scale);
}

double gaussian_cdf(double x, double sd) {
  if (sd <= 0.0) return x < 0.0 ? 0.0 : 1.0;
  return 0.5 * std::erfc(-x / (sd * std::sqrt(2.0)));
}

// One-sample KS statistic of sorted data against a CDF.
template <typename Cdf>
double ks_statistic(const std::vector<double>& sorted, Cdf cdf) {
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max(d, std::max(f - static_cast<double>(i) / n,
                             static_cast<double>(i + 1) / n - f));
  }
  return d;
}

// [Q | 1] as a square matrix.
Matrix augment_ones(const Matrix& q) {
  Matrix a(q.rows, q.cols + 1);
  for (std::size_t i = 0; i < q.rows; ++i) {
    for (std::size_t j = 0; j < q.cols; ++j) a(i, j) = q(i, j);
    a(i, q.cols) = 1.0;
  }
  return a;
}

}  // namespace

QueryMatrix build_query_matrix(std::size_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("build_query_matrix: n must be >= 1");
  Rng rng(seed);
  for (int attempt = 0; attempt < 100; ++attempt) {
    Matrix q(n + 1, n);
    for (auto& v : q.data) v = rng.uniform(-1.0, 1.0);
    if (std::abs(linalg::determinant(augment_ones(q))) > kDetFloor)
      return QueryMatrix{std::move(q), n};
  }
  throw std::runtime_error("build_query_matrix: 100 consecutive singular samples");
}

NoiseFamilyResult hypothesis_test_noise(std::span<const double> samples) {
  if (samples.size() < 8)
    throw std::invalid_argument("hypothesis_test_noise: need at least 8 samples");
  NoiseFamilyResult res;
  std::vector<double> centered(samples.begin(), samples.end());
  const double med = median_of(centered);
  for (auto& v : centered) v -= med;
  std::sort(centered.begin(), centered.end());

  double abs_sum = 0.0, sq_sum = 0.0;
  for (double v : centered) {
    abs_sum += std::abs(v);
    sq_sum += v * v;
  }
  const double n = static_cast<double>(centered.size());
  const double lap_scale = abs_sum / n;
  const double gauss_sd = std::sqrt(sq_sum / n);
  if (lap_scale == 0.0) {
    res.family = NoiseFamily::gaussian;
    res.degenerate = true;
    return res;
  }
  res.ks_laplace =
      ks_statistic(centered, [&](double x) { return laplace_cdf(x, lap_scale); });
  res.ks_gaussian =
      ks_statistic(centered, [&](double x) { return gaussian_cdf(x, gauss_sd); });
  res.family =
      res.ks_laplace < res.ks_gaussian ? NoiseFamily::laplace : NoiseFamily::gaussian;
  return res;
}

CIResult ci_laplace(std::span<const double> samples) {
  if (samples.size() < 2) throw std::invalid_argument("ci_laplace: need at least 2 samples");
  std::vector<double> v(samples.begin(), samples.end());
  const double med = median_of(v);
  double abs_sum = 0.0;
  for (double s : v) abs_sum += std::abs(s - med);
  const double n = static_cast<double>(v.size());
  const double mad = abs_sum / n;
  const double half = laplace_pivot_q975(v.size()) * mad / std::sqrt(n);
  return CIResult{NoiseFamily::laplace, med - half, med + half};
}

CIResult ci_gaussian(std::span<const double> samples) {
  if (samples.size() < 2) throw std::invalid_argument("ci_gaussian: need at least 2 samples");
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= n;
  double ss = 0.0;
  for (double s : samples) ss += (s - mean) * (s - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  const double half = kZ975 * sd / std::sqrt(n);
  return CIResult{NoiseFamily::gaussian, mean - half, mean + half};
}

CIResult ci_for_samples(std::span<const double> samples) {
  if (samples.size() >= 8) {
    const auto test = hypothesis_test_noise(samples);
    if (!test.degenerate && test.family == NoiseFamily::laplace)
      return ci_laplace(samples);
  }
  return ci_gaussian(samples);
}

FindROutcome find_optimal_r(QueryEndpoint& api, const Matrix& queries,
                            const AttackOptions& opts) {
  if (opts.ci_threshold <= 0.0 && !opts.fixed_r)
    throw std::invalid_argument("find_optimal_r: ci_threshold must be positive");
  const std::size_t n_queries = queries.rows;
  FindROutcome out;
  out.responses.samples.assign(n_queries, {});

  auto flood_to = [&](long long r) {
    for (std::size_t j = 0; j < n_queries; ++j) {
      auto& bucket = out.responses.samples[j];
      while (bucket.size() < static_cast<std::size_t>(r)) {
        bucket.push_back(api.submit(queries.row_span(j)));
        ++out.queries_sent;
      }
    }
  };

  if (opts.fixed_r) {
    out.r = std::max<long long>(1, *opts.fixed_r);
    flood_to(out.r);
    out.responses.r = out.r;
    return out;
  }

  long long r = 2;
  while (true) {
    if (opts.strict_alg1)
      for (auto& bucket : out.responses.samples) bucket.clear();
    flood_to(r);
    double max_len = 0.0;
    for (const auto& bucket : out.responses.samples)
      max_len = std::max(max_len, ci_for_samples(bucket).length());
    out.max_ci_length = max_len;
    out.r = r;
    out.responses.r = r;
    if (max_len <= opts.ci_threshold) return out;
    if (r >= opts.r_cap) {
      out.capped = true;
      return out;
    }
    r *= 2;
  }
}

std::vector<double> denoise(const DuplicatedResponses& responses) {
  if (responses.samples.empty())
    throw std::invalid_argument("denoise: no responses collected");
  std::vector<double> z;
  z.reserve(responses.samples.size());
  for (const auto& bucket : responses.samples) {
    if (bucket.empty()) throw std::invalid_argument("denoise: empty response list");
    double s = 0.0;
    for (double v : bucket) s += v;
    z.push_back(s / static_cast<double>(bucket.size()));
  }
  return z;
}

ExtractedModel solve_cramer(const QueryMatrix& q, std::span<const double> z) {
  const std::size_t n = q.n;
  if (q.q.rows != n + 1 || z.size() != n + 1)
    throw std::invalid_argument("solve_cramer: need n+1 queries and n+1 results");
  const Matrix a = augment_ones(q.q);
  const double det = linalg::determinant(a);
  if (std::abs(det) < kSingularFloor)
    throw std::runtime_error("solve_cramer: query system is singular");

  ExtractedModel model;
  model.kind = ExtractedModel::Kind::linear_solve;
  std::vector<double> coeffs(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    Matrix ak = a;  // k-result matrix: column k replaced by z
    for (std::size_t i = 0; i <= n; ++i) ak(i, k) = z[i];
    coeffs[k] = linalg::determinant(ak) / det;
  }

  // independent route: Gaussian elimination on the same augmented system
  const auto direct = linalg::solve(a, std::vector<double>(z.begin(), z.end()));
  double scale = 1.0;
  for (double c : coeffs) scale = std::max(scale, std::abs(c));
  for (std::size_t k = 0; k <= n; ++k)
    if (std::abs(coeffs[k] - direct[k]) > 1e-6 * scale)
      throw std::runtime_error("solve_cramer: determinant route disagrees with elimination");

  model.a.assign(coeffs.begin(), coeffs.begin() + static_cast<std::ptrdiff_t>(n));
  model.b = coeffs[n];
  return model;
}

ExtractedModel attack_logistic(QueryEndpoint& api, std::size_t n,
                               const AttackOptions& opts) {
  if (api.dimension() != n)
    throw std::invalid_argument("attack_logistic: endpoint dimension mismatch");
  const QueryMatrix q = build_query_matrix(n, opts.seed);
  const FindROutcome found = find_optimal_r(api, q.q, opts);
  std::vector<double> z = denoise(found.responses);

  if (opts.debias_keep_prob) {
    const double k = *opts.debias_keep_prob;
    if (k <= 0.5 || k >= 1.0)
      throw std::invalid_argument("attack_logistic: keep probability must be in (0.5, 1)");
    for (auto& v : z) v = (v - (1.0 - k)) / (2.0 * k - 1.0);
  }

  // invert the sigmoid; averaged responses may touch {0,1}
  for (auto& v : z) {
    const double p = std::clamp(v, 1e-6, 1.0 - 1e-6);
    v = std::log(p / (1.0 - p));
  }

  ExtractedModel model = solve_cramer(q, z);
  model.r = found.r;
  model.queries_used = found.r * static_cast<long long>(n + 1);
  model.capped = found.capped;
  return model;
}

ShadowResult attack_shadow(QueryEndpoint& api, std::size_t n, const AttackOptions& opts,
                           const TrainConfig& shadow_cfg) {
  if (api.dimension() != n)
    throw std::invalid_argument("attack_shadow: endpoint dimension mismatch");
  const std::size_t s = opts.shadow_queries.value_or(20 * (n + 1));
  if (s < 2) throw std::invalid_argument("attack_shadow: need at least 2 queries");
  Rng rng = Rng(opts.seed).derive(7);
  Matrix queries(s, n);
  for (auto& v : queries.data) v = rng.uniform(-1.0, 1.0);

  const FindROutcome found = find_optimal_r(api, queries, opts);
  std::vector<double> targets = denoise(found.responses);
  for (auto& t : targets) t = std::clamp(t, 0.0, 1.0);

  ShadowResult res;
  res.model = fit_nn(queries, targets, shadow_cfg);
  res.r = found.r;
  res.queries_used = found.queries_sent;
  res.capped = found.capped;
  return res;
}

}  // namespace qpdlab
