#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "zspace/errors.hpp"

namespace zspace {

// Small dense row-major matrix. Only what the projection needs.
struct Matrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(size_t r, size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(size_t i, size_t j) { return data[i * cols + j]; }
  double operator()(size_t i, size_t j) const { return data[i * cols + j]; }
};

// Solves M x = b for symmetric positive definite M via Cholesky.
// Caller guarantees symmetry; only the lower triangle is read.
inline std::vector<double> solve_spd(const Matrix& m, const std::vector<double>& b) {
  const size_t k = m.rows;
  if (k == 0 || m.cols != k) throw DimMismatchError(m.rows, m.cols);
  if (b.size() != k) throw DimMismatchError(b.size(), k);

  Matrix l(k, k);
  for (size_t i = 0; i < k; ++i) {
    for (size_t j = 0; j <= i; ++j) {
      double s = m(i, j);
      for (size_t p = 0; p < j; ++p) s -= l(i, p) * l(j, p);
      if (i == j) {
        if (!(s > 0.0) || !std::isfinite(s)) throw NotPositiveDefiniteError();
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }

  // L y = b, then L^T x = y.
  std::vector<double> x(b);
  for (size_t i = 0; i < k; ++i) {
    for (size_t p = 0; p < i; ++p) x[i] -= l(i, p) * x[p];
    x[i] /= l(i, i);
  }
  for (size_t ii = k; ii-- > 0;) {
    for (size_t p = ii + 1; p < k; ++p) x[ii] -= l(p, ii) * x[p];
    x[ii] /= l(ii, ii);
  }
  return x;
}

}  // namespace zspace
