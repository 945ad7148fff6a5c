#ifndef QPDLAB_KERNELS_HPP
#define QPDLAB_KERNELS_HPP

#include <span>
#include <vector>

#include "qpdlab/matrix.hpp"

namespace qpdlab::kernels {

/// Data-parallel inner loops used by the monitor and the trainers.
///
/// Every kernel exists twice: a plain serial reference (namespace serial)
/// and an OpenMP variant (namespace par). The par reductions accumulate
/// into fixed-size blocks that are combined in block order, so their
/// results do not depend on the number of threads. The unqualified
/// functions dispatch to par for large inputs when built with OpenMP.

/// Pearson correlation of u against every row of m (one coefficient per
/// row). Rows or u with zero variance correlate 0 by convention.
namespace serial {
void row_correlations(const Matrix& m, std::span<const double> u, double* out);

/// sum_i max(0, pcc(row_i, u)) * weight_i  -- the Eq.-2 style dot product.
double correlation_weighted_sum(const Matrix& m, std::span<const double> u,
                                std::span<const double> weight);

/// Mean cross-entropy loss of a logistic model (coeffs a, intercept b) and
/// its gradient. grad has size n+1: d/da_1..d/da_n, then d/db.
double logistic_loss_grad(const Matrix& x, std::span<const double> target,
                          std::span<const double> a, double b,
                          std::span<double> grad);
}  // namespace serial

namespace par {
void row_correlations(const Matrix& m, std::span<const double> u, double* out);
double correlation_weighted_sum(const Matrix& m, std::span<const double> u,
                                std::span<const double> weight);
double logistic_loss_grad(const Matrix& x, std::span<const double> target,
                          std::span<const double> a, double b,
                          std::span<double> grad);
}  // namespace par

void row_correlations(const Matrix& m, std::span<const double> u, double* out);
double correlation_weighted_sum(const Matrix& m, std::span<const double> u,
                                std::span<const double> weight);
double logistic_loss_grad(const Matrix& x, std::span<const double> target,
                          std::span<const double> a, double b,
                          std::span<double> grad);

/// True when the OpenMP paths are compiled in.
bool parallel_enabled();

}  // namespace qpdlab::kernels

#endif
