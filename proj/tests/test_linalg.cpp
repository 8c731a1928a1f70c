#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "zspace/hash.hpp"
#include "zspace/linalg.hpp"

using namespace zspace;

TEST_CASE("solve_spd identity and diagonal systems") {
  Matrix eye(2, 2);
  eye(0, 0) = 1.0;
  eye(1, 1) = 1.0;
  const auto x = solve_spd(eye, {3.0, 5.0});
  CHECK(x[0] == Catch::Approx(3.0));
  CHECK(x[1] == Catch::Approx(5.0));

  Matrix diag(2, 2);
  diag(0, 0) = 2.0;
  diag(1, 1) = 4.0;
  const auto y = solve_spd(diag, {2.0, 8.0});
  CHECK(y[0] == Catch::Approx(1.0));
  CHECK(y[1] == Catch::Approx(2.0));
}

TEST_CASE("solve_spd rejects indefinite matrices") {
  Matrix m(2, 2);
  m(0, 0) = 1.0;
  m(0, 1) = 2.0;
  m(1, 0) = 2.0;
  m(1, 1) = 1.0;
  CHECK_THROWS_AS(solve_spd(m, {1.0, 1.0}), NotPositiveDefiniteError);
}

TEST_CASE("solve_spd matches elimination oracle on random A^T A + ridge") {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const size_t k = 1 + rng.below(16);
    // Random rectangular A, then M = A^T A + 0.001 I is SPD.
    const size_t rows = k + rng.below(8);
    std::vector<std::vector<double>> a(rows, std::vector<double>(k));
    for (auto& row : a) {
      for (double& v : row) v = rng.next_double() * 2.0 - 1.0;
    }
    Matrix m(k, k);
    std::vector<std::vector<double>> md(k, std::vector<double>(k, 0.0));
    for (size_t i = 0; i < k; ++i) {
      for (size_t j = 0; j < k; ++j) {
        double s = 0.0;
        for (size_t r = 0; r < rows; ++r) s += a[r][i] * a[r][j];
        if (i == j) s += 0.001;
        m(i, j) = s;
        md[i][j] = s;
      }
    }
    std::vector<double> b(k);
    for (double& v : b) v = rng.next_double() * 4.0 - 2.0;

    const auto x = solve_spd(m, b);
    const auto ref = oracle::solve_dense(md, b);
    double bmax = 1.0;
    for (double v : b) bmax = std::max(bmax, std::abs(v));
    for (size_t i = 0; i < k; ++i) {
      REQUIRE(std::abs(x[i] - ref[i]) <= 1e-8);
    }
    // Residual bound from the contract.
    for (size_t i = 0; i < k; ++i) {
      double r = -b[i];
      for (size_t j = 0; j < k; ++j) r += m(i, j) * x[j];
      REQUIRE(std::abs(r) <= 1e-8 * bmax);
    }
  }
}
