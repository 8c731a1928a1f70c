// Test-only reference implementations, kept independent of the library
// code paths they check.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "zspace/vec.hpp"

namespace oracle {

// Gaussian elimination with partial pivoting. Dense, naive, slow.
inline std::vector<double> solve_dense(std::vector<std::vector<double>> m,
                                       std::vector<double> b) {
  const size_t n = m.size();
  for (size_t col = 0; col < n; ++col) {
    size_t pivot = col;
    for (size_t r = col + 1; r < n; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    }
    if (std::abs(m[pivot][col]) < 1e-14) throw std::runtime_error("singular");
    std::swap(m[col], m[pivot]);
    std::swap(b[col], b[pivot]);
    for (size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      for (size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (size_t i = 0; i < n; ++i) x[i] = b[i] / m[i][i];
  return x;
}

// Explicit matrix inverse via elimination against the identity.
inline std::vector<std::vector<double>> invert_dense(
    const std::vector<std::vector<double>>& m) {
  const size_t n = m.size();
  std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
  for (size_t c = 0; c < n; ++c) {
    std::vector<double> e(n, 0.0);
    e[c] = 1.0;
    const auto col = solve_dense(m, e);
    for (size_t r = 0; r < n; ++r) inv[r][c] = col[r];
  }
  return inv;
}

// Ridge projection assembled the long way: build S column by column,
// form S^T S + eps I, invert it explicitly, multiply through.
inline zspace::Vector projection_pseudo_inverse(
    const zspace::Vector& statement,
    const std::vector<zspace::Vector>& unit_keywords,
    const std::vector<double>& weights, double epsilon) {
  const size_t k = unit_keywords.size();
  const size_t dim = statement.size();
  std::vector<zspace::Vector> cols(k);
  for (size_t j = 0; j < k; ++j) {
    cols[j] = zspace::scaled(unit_keywords[j], weights[j]);
  }
  std::vector<std::vector<double>> gram(k, std::vector<double>(k, 0.0));
  for (size_t i = 0; i < k; ++i) {
    for (size_t j = 0; j < k; ++j) {
      double s = 0.0;
      for (size_t d = 0; d < dim; ++d) s += cols[i][d] * cols[j][d];
      gram[i][j] = s;
    }
    gram[i][i] += epsilon;
  }
  const auto inv = invert_dense(gram);
  std::vector<double> sta(k, 0.0);
  for (size_t j = 0; j < k; ++j) {
    for (size_t d = 0; d < dim; ++d) sta[j] += cols[j][d] * statement[d];
  }
  std::vector<double> coeff(k, 0.0);
  for (size_t i = 0; i < k; ++i) {
    for (size_t j = 0; j < k; ++j) coeff[i] += inv[i][j] * sta[j];
  }
  zspace::Vector out(dim, 0.0);
  for (size_t j = 0; j < k; ++j) {
    for (size_t d = 0; d < dim; ++d) out[d] += coeff[j] * cols[j][d];
  }
  return out;
}

}  // namespace oracle
