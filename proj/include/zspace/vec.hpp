#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "zspace/errors.hpp"

namespace zspace {

using Vector = std::vector<double>;

inline constexpr double kZeroNormFloor = 1e-12;

inline double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimMismatchError(a.size(), b.size());
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vector& v) { return std::sqrt(dot(v, v)); }

// v / ||v||_2. Input unchanged.
inline Vector normalize(const Vector& v) {
  const double n = norm(v);
  if (n < kZeroNormFloor) throw ZeroVectorError();
  Vector out(v);
  for (double& x : out) x /= n;
  return out;
}

// Clamped to [-1, 1] against round-off.
inline double cosine(const Vector& a, const Vector& b) {
  const double na = norm(a);
  const double nb = norm(b);
  if (na < kZeroNormFloor || nb < kZeroNormFloor) throw ZeroVectorError();
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

inline bool near_unit(const Vector& v, double tol = 1e-9) {
  return std::abs(norm(v) - 1.0) <= tol;
}

inline Vector scaled(const Vector& v, double c) {
  Vector out(v);
  for (double& x : out) x *= c;
  return out;
}

// y += c * x
inline void axpy(Vector& y, double c, const Vector& x) {
  if (y.size() != x.size()) throw DimMismatchError(y.size(), x.size());
  for (size_t i = 0; i < y.size(); ++i) y[i] += c * x[i];
}

}  // namespace zspace
