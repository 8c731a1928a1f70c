#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "zspace/errors.hpp"
#include "zspace/linalg.hpp"
#include "zspace/vec.hpp"

namespace zspace {

// Keywords whose (clamped) weight falls at or below this floor are
// dropped before any component is built.
inline constexpr double kWeightFloor = 1e-9;

struct FsswConfig {
  double alpha = 0.5;       // subspace-projection coefficient, must stay < 1
  double beta = 0.1;        // word-center coefficient
  double gamma = 0.6;       // differential coefficient
  double lambda = 0.6;      // residual strength
  double epsilon = 1e-3;    // ridge parameter
  double delta = 0.9;       // semantic-guard threshold
  int max_guard_iters = 8;
  double shrink = 0.5;      // coefficient shrink factor per guard retry
};

// All intermediates of one enhancement run.
struct FsswTrace {
  std::vector<double> weights;          // clamped per-keyword weights
  double mean_weight = 0.0;             // mean over the original keyword count
  std::optional<Vector> projection;     // weighted subspace projection of the statement
  std::optional<Vector> centroid;       // weighted word center
  std::optional<Vector> differential;   // weighted differential direction
  Vector fused;                         // pre-residual fusion result (last guard pass)
  double gate = 0.0;                    // residual gate
  Vector output;                        // final enhanced vector, unit norm
  int guard_iterations = 0;             // shrink retries performed
  bool guard_satisfied = true;
  bool fusion_degenerate = false;       // fusion sum collapsed; statement used instead
};

struct FsswResult {
  Vector output;
  FsswTrace trace;
};

// Attention-style weights: cosine against the normalized statement,
// clamped at zero so opposing keywords cannot flip basis columns.
inline std::vector<double> word_weights(const Vector& statement,
                                        const std::vector<Vector>& keywords) {
  std::vector<double> weights;
  weights.reserve(keywords.size());
  for (const Vector& kw : keywords) {
    weights.push_back(std::max(0.0, cosine(statement, kw)));
  }
  return weights;
}

namespace detail {

struct EffectiveKeywords {
  std::vector<Vector> unit;     // normalized keyword vectors
  std::vector<double> weight;   // aligned weights, all > kWeightFloor
};

inline EffectiveKeywords retain_effective(const std::vector<Vector>& keywords,
                                          const std::vector<double>& weights) {
  if (keywords.size() != weights.size()) {
    throw DimMismatchError(keywords.size(), weights.size());
  }
  EffectiveKeywords eff;
  for (size_t j = 0; j < keywords.size(); ++j) {
    if (weights[j] > kWeightFloor) {
      eff.unit.push_back(normalize(keywords[j]));
      eff.weight.push_back(weights[j]);
    }
  }
  return eff;
}

}  // namespace detail

// Ridge-regularized projection of the statement onto the span of the
// weight-scaled keyword columns: S (S^T S + eps I)^-1 S^T a. The result is
// intentionally not normalized; fusion handles that.
inline Vector weighted_projection(const Vector& statement,
                                  const std::vector<Vector>& keywords,
                                  const std::vector<double>& weights,
                                  double epsilon) {
  const auto eff = detail::retain_effective(keywords, weights);
  const size_t k = eff.unit.size();
  if (k == 0) throw NoEffectiveKeywordsError();

  std::vector<Vector> cols;
  cols.reserve(k);
  for (size_t j = 0; j < k; ++j) {
    cols.push_back(scaled(eff.unit[j], eff.weight[j]));
  }

  Matrix gram(k, k);
  std::vector<double> rhs(k);
  for (size_t i = 0; i < k; ++i) {
    for (size_t j = 0; j <= i; ++j) {
      const double g = dot(cols[i], cols[j]);
      gram(i, j) = g;
      gram(j, i) = g;
    }
    gram(i, i) += epsilon;
    rhs[i] = dot(cols[i], statement);
  }

  const std::vector<double> coeff = solve_spd(gram, rhs);
  Vector out(statement.size(), 0.0);
  for (size_t j = 0; j < k; ++j) axpy(out, coeff[j], cols[j]);
  return out;
}

// Normalized weighted mean of the keyword vectors.
inline Vector word_center(const std::vector<Vector>& keywords,
                          const std::vector<double>& weights) {
  const auto eff = detail::retain_effective(keywords, weights);
  const double total = std::accumulate(eff.weight.begin(), eff.weight.end(), 0.0);
  if (eff.unit.empty() || total <= kWeightFloor) throw NoEffectiveKeywordsError();

  Vector acc(eff.unit.front().size(), 0.0);
  for (size_t j = 0; j < eff.unit.size(); ++j) {
    axpy(acc, eff.weight[j] / total, eff.unit[j]);
  }
  return normalize(acc);
}

// Normalized weighted sum of the per-keyword increments (w_j - a).
inline Vector differential_vector(const Vector& statement,
                                  const std::vector<Vector>& keywords,
                                  const std::vector<double>& weights) {
  const auto eff = detail::retain_effective(keywords, weights);
  const double total = std::accumulate(eff.weight.begin(), eff.weight.end(), 0.0);
  if (eff.unit.empty() || total <= kWeightFloor) throw NoEffectiveKeywordsError();

  Vector acc(statement.size(), 0.0);
  for (size_t j = 0; j < eff.unit.size(); ++j) {
    Vector delta = eff.unit[j];
    axpy(delta, -1.0, statement);
    axpy(acc, eff.weight[j], delta);
  }
  if (norm(acc) <= 1e-9) throw DegenerateDifferentialError();
  return normalize(acc);
}

struct FusionComponents {
  std::optional<Vector> projection;
  std::optional<Vector> centroid;
  std::optional<Vector> differential;
};

// Four competing forces: keep the statement, align with the keyword
// subspace, approach the keyword centroid, move along the correction
// direction. Absent components contribute nothing.
inline Vector fuse(const Vector& statement, const FusionComponents& parts,
                   const FsswConfig& cfg) {
  Vector acc = scaled(statement, 1.0 - cfg.alpha);
  if (parts.projection) axpy(acc, cfg.alpha, *parts.projection);
  if (parts.centroid) axpy(acc, cfg.beta, *parts.centroid);
  if (parts.differential) axpy(acc, cfg.gamma, *parts.differential);
  if (norm(acc) <= 1e-9) throw DegenerateFusionError();
  return normalize(acc);
}

// Residual blend between statement and fused vector; the gate opens with
// the mean keyword weight. Returns (output, gate). The output is
// re-normalized so downstream cosine ranking sees unit vectors.
inline std::pair<Vector, double> gated_residual(const Vector& statement,
                                                const Vector& fused,
                                                double mean_weight,
                                                double lambda) {
  const double gate = lambda * (0.3 + 0.7 * mean_weight);
  const Vector fhat = normalize(fused);
  Vector acc = scaled(statement, 1.0 - gate);
  axpy(acc, gate, fhat);
  if (norm(acc) < kZeroNormFloor) return {statement, gate};
  return {normalize(acc), gate};
}

namespace detail {

inline void validate_config(const FsswConfig& cfg) {
  if (!(cfg.alpha < 1.0)) throw Error("fsww: alpha must be < 1");
  if (!(cfg.epsilon > 0.0)) throw Error("fsww: epsilon must be > 0");
  if (!(cfg.shrink > 0.0 && cfg.shrink < 1.0)) throw Error("fsww: shrink must be in (0,1)");
}

inline FsswResult enhance_with_weights(const Vector& unit_statement,
                                       const std::vector<Vector>& keywords,
                                       std::vector<double> weights,
                                       const FsswConfig& cfg) {
  validate_config(cfg);
  const size_t k = keywords.size();
  FsswTrace trace;
  trace.weights = weights;
  trace.mean_weight =
      k == 0 ? 0.0 : std::accumulate(weights.begin(), weights.end(), 0.0) / double(k);
  trace.gate = cfg.lambda * (0.3 + 0.7 * trace.mean_weight);

  const auto eff = retain_effective(keywords, weights);
  if (eff.unit.empty()) {
    // No keywords carry weight: the enhancement is the identity, exactly.
    trace.fused = unit_statement;
    trace.output = unit_statement;
    return {unit_statement, trace};
  }

  trace.projection = weighted_projection(unit_statement, eff.unit, eff.weight, cfg.epsilon);
  trace.centroid = word_center(eff.unit, eff.weight);
  try {
    trace.differential = differential_vector(unit_statement, eff.unit, eff.weight);
  } catch (const DegenerateDifferentialError&) {
    trace.differential.reset();
  }

  const FusionComponents parts{trace.projection, trace.centroid, trace.differential};
  FsswConfig work = cfg;
  for (int iter = 0;; ++iter) {
    Vector fused;
    try {
      fused = fuse(unit_statement, parts, work);
      trace.fusion_degenerate = false;
    } catch (const DegenerateFusionError&) {
      fused = unit_statement;
      trace.fusion_degenerate = true;
    }
    auto [candidate, gate] = gated_residual(unit_statement, fused, trace.mean_weight, cfg.lambda);
    trace.fused = fused;
    trace.gate = gate;

    if (cosine(unit_statement, candidate) >= cfg.delta) {
      trace.output = candidate;
      trace.guard_satisfied = true;
      trace.guard_iterations = iter;
      return {std::move(candidate), trace};
    }
    if (iter >= cfg.max_guard_iters) {
      // Fall back to the statement itself; trivially preserves semantics.
      trace.output = unit_statement;
      trace.guard_satisfied = false;
      trace.guard_iterations = iter;
      return {unit_statement, trace};
    }
    work.alpha *= cfg.shrink;
    work.beta *= cfg.shrink;
    work.gamma *= cfg.shrink;
  }
}

}  // namespace detail

// Full pipeline: weights, components, fusion, gated residual, semantic
// guard. The guard re-runs only fusion + residual with shrunk
// coefficients; weights and component directions do not depend on them.
inline FsswResult fsww_enhance(const Vector& statement,
                               const std::vector<Vector>& keywords,
                               const FsswConfig& cfg = {}) {
  const Vector a = normalize(statement);
  return detail::enhance_with_weights(a, keywords, word_weights(a, keywords), cfg);
}

// Weight-override variant. Bypasses word_weights; weights are taken as
// given (unclamped), which lets callers probe guard behaviour directly.
inline FsswResult fsww_enhance_weighted(const Vector& statement,
                                        const std::vector<Vector>& keywords,
                                        std::vector<double> weights,
                                        const FsswConfig& cfg = {}) {
  const Vector a = normalize(statement);
  return detail::enhance_with_weights(a, keywords, std::move(weights), cfg);
}

}  // namespace zspace
