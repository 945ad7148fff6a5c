#include "qpdlab/kernels.hpp"

#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qpdlab::kernels {
namespace {

constexpr std::size_t kParThreshold = 512;  // rows below this stay serial
constexpr std::size_t kBlock = 1024;        // reduction block, fixed so results
                                            // do not depend on thread count
constexpr double kVarEps = 1e-24;

struct CenteredQuery {
  std::vector<double> centered;
  double norm_sq = 0.0;
};

CenteredQuery center(std::span<const double> u) {
  CenteredQuery q;
  double mean = 0.0;
  for (double v : u) mean += v;
  mean /= static_cast<double>(u.size());
  q.centered.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    q.centered[i] = u[i] - mean;
    q.norm_sq += q.centered[i] * q.centered[i];
  }
  return q;
}

// pcc(row, u) given u already centered. Since sum(u_centered) = 0,
// cov(row, u) reduces to dot(row, u_centered).
inline double row_pcc(const double* row, const CenteredQuery& q, std::size_t d) {
  double sx = 0.0, sxx = 0.0, sxu = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double v = row[j];
    sx += v;
    sxx += v * v;
    sxu += v * q.centered[j];
  }
  const double var_x = sxx - sx * sx / static_cast<double>(d);
  const double denom = var_x * q.norm_sq;
  if (denom <= kVarEps) return 0.0;
  return sxu / std::sqrt(denom);
}

inline double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

void check_dims(const Matrix& m, std::span<const double> u) {
  if (m.cols != u.size())
    throw std::invalid_argument("kernels: query width does not match matrix");
  if (u.size() < 2)
    throw std::invalid_argument("kernels: correlation needs at least 2 coordinates");
}

// Per-block partial of correlation_weighted_sum; serial within the block.
double cws_block(const Matrix& m, const CenteredQuery& q,
                 std::span<const double> weight, std::size_t lo, std::size_t hi) {
  double acc = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    const double r = row_pcc(m.row(i), q, m.cols);
    if (r > 0.0) acc += r * weight[i];
  }
  return acc;
}

// Per-block partial of the logistic loss/gradient. grad layout: a_1..a_n, b.
double llg_block(const Matrix& x, std::span<const double> target,
                 std::span<const double> a, double b, double* grad,
                 std::size_t lo, std::size_t hi) {
  const std::size_t n = x.cols;
  double loss = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    const double* row = x.row(i);
    double t = b;
    for (std::size_t j = 0; j < n; ++j) t += a[j] * row[j];
    const double p = sigmoid(t);
    const double y = target[i];
    // clamped log to keep separable datasets finite
    const double eps = 1e-12;
    loss += -(y * std::log(std::max(p, eps)) + (1.0 - y) * std::log(std::max(1.0 - p, eps)));
    const double delta = p - y;
    for (std::size_t j = 0; j < n; ++j) grad[j] += delta * row[j];
    grad[n] += delta;
  }
  return loss;
}

}  // namespace

namespace serial {

void row_correlations(const Matrix& m, std::span<const double> u, double* out) {
  check_dims(m, u);
  const CenteredQuery q = center(u);
  for (std::size_t i = 0; i < m.rows; ++i) out[i] = row_pcc(m.row(i), q, m.cols);
}

double correlation_weighted_sum(const Matrix& m, std::span<const double> u,
                                std::span<const double> weight) {
  check_dims(m, u);
  if (weight.size() != m.rows)
    throw std::invalid_argument("kernels: weight length does not match rows");
  const CenteredQuery q = center(u);
  return cws_block(m, q, weight, 0, m.rows);
}

double logistic_loss_grad(const Matrix& x, std::span<const double> target,
                          std::span<const double> a, double b,
                          std::span<double> grad) {
  if (a.size() != x.cols || grad.size() != x.cols + 1 || target.size() != x.rows)
    throw std::invalid_argument("kernels: logistic gradient shape mismatch");
  std::fill(grad.begin(), grad.end(), 0.0);
  const double loss = llg_block(x, target, a, b, grad.data(), 0, x.rows);
  const double inv_m = 1.0 / static_cast<double>(x.rows);
  for (auto& g : grad) g *= inv_m;
  return loss * inv_m;
}

}  // namespace serial

namespace par {

void row_correlations(const Matrix& m, std::span<const double> u, double* out) {
  check_dims(m, u);
  const CenteredQuery q = center(u);
  const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(m.rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < rows; ++i)
    out[i] = row_pcc(m.row(static_cast<std::size_t>(i)), q, m.cols);
}

double correlation_weighted_sum(const Matrix& m, std::span<const double> u,
                                std::span<const double> weight) {
  check_dims(m, u);
  if (weight.size() != m.rows)
    throw std::invalid_argument("kernels: weight length does not match rows");
  const CenteredQuery q = center(u);
  const std::size_t nblocks = (m.rows + kBlock - 1) / kBlock;
  std::vector<double> partial(nblocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t bi = 0; bi < static_cast<std::ptrdiff_t>(nblocks); ++bi) {
    const std::size_t lo = static_cast<std::size_t>(bi) * kBlock;
    const std::size_t hi = std::min(lo + kBlock, m.rows);
    partial[static_cast<std::size_t>(bi)] = cws_block(m, q, weight, lo, hi);
  }
  double acc = 0.0;
  for (double p : partial) acc += p;  // fixed combine order
  return acc;
}

double logistic_loss_grad(const Matrix& x, std::span<const double> target,
                          std::span<const double> a, double b,
                          std::span<double> grad) {
  if (a.size() != x.cols || grad.size() != x.cols + 1 || target.size() != x.rows)
    throw std::invalid_argument("kernels: logistic gradient shape mismatch");
  const std::size_t n = x.cols;
  const std::size_t nblocks = (x.rows + kBlock - 1) / kBlock;
  std::vector<double> partial_grad(nblocks * (n + 1), 0.0);
  std::vector<double> partial_loss(nblocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t bi = 0; bi < static_cast<std::ptrdiff_t>(nblocks); ++bi) {
    const std::size_t b_idx = static_cast<std::size_t>(bi);
    const std::size_t lo = b_idx * kBlock;
    const std::size_t hi = std::min(lo + kBlock, x.rows);
    partial_loss[b_idx] =
        llg_block(x, target, a, b, partial_grad.data() + b_idx * (n + 1), lo, hi);
  }
  std::fill(grad.begin(), grad.end(), 0.0);
  double loss = 0.0;
  for (std::size_t b_idx = 0; b_idx < nblocks; ++b_idx) {
    loss += partial_loss[b_idx];
    const double* pg = partial_grad.data() + b_idx * (n + 1);
    for (std::size_t j = 0; j <= n; ++j) grad[j] += pg[j];
  }
  const double inv_m = 1.0 / static_cast<double>(x.rows);
  for (auto& g : grad) g *= inv_m;
  return loss * inv_m;
}

}  // namespace par

bool parallel_enabled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

namespace {
bool use_par(std::size_t rows) {
#ifdef _OPENMP
  if (omp_in_parallel()) return false;  // no nested teams
  return rows >= kParThreshold;
#else
  (void)rows;
  return false;
#endif
}
}  // namespace

void row_correlations(const Matrix& m, std::span<const double> u, double* out) {
  if (use_par(m.rows))
    par::row_correlations(m, u, out);
  else
    serial::row_correlations(m, u, out);
}

double correlation_weighted_sum(const Matrix& m, std::span<const double> u,
                                std::span<const double> weight) {
  return use_par(m.rows) ? par::correlation_weighted_sum(m, u, weight)
                         : serial::correlation_weighted_sum(m, u, weight);
}

double logistic_loss_grad(const Matrix& x, std::span<const double> target,
                          std::span<const double> a, double b,
                          std::span<double> grad) {
  return use_par(x.rows) ? par::logistic_loss_grad(x, target, a, b, grad)
                         : serial::logistic_loss_grad(x, target, a, b, grad);
}

}  // namespace qpdlab::kernels
