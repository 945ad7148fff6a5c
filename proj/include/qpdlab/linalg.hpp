#ifndef QPDLAB_LINALG_HPP
#define QPDLAB_LINALG_HPP

#include <span>
#include <vector>

#include "qpdlab/matrix.hpp"

namespace qpdlab::linalg {

/// Determinant of a square matrix via LU with partial pivoting.
double determinant(Matrix a);

/// Solve a x = b by Gaussian elimination with partial pivoting.
/// Throws std::runtime_error when the system is numerically singular.
std::vector<double> solve(Matrix a, std::vector<double> b);

}  // namespace qpdlab::linalg

#endif
