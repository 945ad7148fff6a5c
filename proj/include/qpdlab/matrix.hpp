#ifndef QPDLAB_MATRIX_HPP
#define QPDLAB_MATRIX_HPP

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace qpdlab {

/// Dense row-major matrix of doubles. Small and value-semantic; all the
/// linear algebra in this project is on matrices of at most a few thousand
/// rows, so no sparsity or expression templates.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  double* row(std::size_t i) { return data.data() + i * cols; }
  const double* row(std::size_t i) const { return data.data() + i * cols; }

  std::span<const double> row_span(std::size_t i) const {
    return {data.data() + i * cols, cols};
  }

  void append_row(std::span<const double> r) {
    if (cols == 0) cols = r.size();
    if (r.size() != cols) throw std::invalid_argument("Matrix::append_row: width mismatch");
    data.insert(data.end(), r.begin(), r.end());
    ++rows;
  }

  static Matrix from_rows(const std::vector<std::vector<double>>& r) {
    Matrix m;
    for (const auto& v : r) m.append_row(v);
    return m;
  }
};

}  // namespace qpdlab

#endif
