#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sgpca/error.hpp"
#include "sgpca/types.hpp"

namespace sgpca {

// Effective signal-to-noise scaling h(x) = x^2 / (1 + x); behaves like x^2
// for small x and like x for large x.
inline double snr(double x) {
  if (!(x > 0.0)) fail(ErrorCode::DomainError, "snr: argument must be > 0");
  return x * x / (1.0 + x);
}

// Hierarchical sparsity model: ordered group norms decay inside a
// weak-l_{G,r} ball of radius m_G, and entries within the leading g groups
// decay with per-g constants m_(g). Problem sizes are real-valued so the
// threshold formulas can be probed directly.
struct SparsityModel {
  double r = 1.0;                       // decay exponent, in (0, 2)
  double m_G = 1.0;                     // group-level envelope radius
  std::vector<double> m_within = {1.0}; // m_(g), clamped to the last entry
  double lambda_sq = 1.0;               // spike strength lambda^2
  double num_groups = 1.0;              // G
  double group_size = 1.0;              // T
  double sample_size = 1.0;             // n
  double alpha = 1.0;
  double beta = 1.0;
  double eta = 1.0;
  double tau = 1.0;

  void validate() const {
    if (!(r > 0.0) || !(r < 2.0)) fail(ErrorCode::DomainError, "SparsityModel: r must be in (0,2)");
    if (!(m_G > 0.0)) fail(ErrorCode::DomainError, "SparsityModel: m_G must be > 0");
    if (m_within.empty()) fail(ErrorCode::DomainError, "SparsityModel: m_within empty");
    for (double m : m_within)
      if (!(m > 0.0)) fail(ErrorCode::DomainError, "SparsityModel: m_(g) must be > 0");
    if (!(lambda_sq > 0.0)) fail(ErrorCode::DomainError, "SparsityModel: lambda_sq must be > 0");
    if (!(num_groups >= 1.0) || !(group_size >= 1.0) || !(sample_size >= 1.0))
      fail(ErrorCode::DomainError, "SparsityModel: sizes must be >= 1");
    if (!(alpha > 0.0) || !(beta > 0.0) || !(eta > 0.0) || !(tau > 0.0))
      fail(ErrorCode::DomainError, "SparsityModel: constants must be > 0");
  }

  double m_at(int g) const {
    const std::size_t index = static_cast<std::size_t>(std::max(1, g)) - 1;
    return m_within[std::min(index, m_within.size() - 1)];
  }
};

struct LoadingThresholds {
  double alpha_n = 0.0;  // group-level loading threshold
  double beta_n = 0.0;   // entry-level loading threshold
};

// alpha_n = alpha * sqrt(log G / (n h(lambda^2))),
// beta_n  = beta  * sqrt(log(T |G|) / (n h(lambda^2))), with |G| supplied.
inline LoadingThresholds loading_thresholds(const SparsityModel& model, int cardinality_hint) {
  model.validate();
  if (cardinality_hint < 1)
    fail(ErrorCode::DomainError, "loading_thresholds: cardinality hint must be >= 1");
  const double h = snr(model.lambda_sq);
  const double n = model.sample_size;
  const double log_g = std::log(model.num_groups);
  const double log_tg = std::log(model.group_size * static_cast<double>(cardinality_hint));
  if (log_g < 0.0 || log_tg < 0.0)
    fail(ErrorCode::DomainError, "loading_thresholds: log argument below 1");
  return {model.alpha * std::sqrt(log_g / (n * h)), model.beta * std::sqrt(log_tg / (n * h))};
}

struct OracleSets {
  std::vector<int> groups;  // {g : ||v_(I_g)|| >= alpha_n}
  std::vector<int> coords;  // {j in Psi(groups) : |v_j| >= beta_n}
};

inline OracleSets oracle_sets(const Vector& v, const GroupPartition& partition, double alpha_n,
                              double beta_n) {
  if (v.size() != partition.dim())
    fail(ErrorCode::DimensionMismatch, "oracle_sets: vector does not match partition");
  OracleSets sets;
  for (int g = 0; g < partition.num_groups(); ++g) {
    double sum_sq = 0.0;
    for (int c : partition.group(g)) sum_sq += v[c] * v[c];
    if (std::sqrt(sum_sq) >= alpha_n) {
      sets.groups.push_back(g);
      for (int c : partition.group(g))
        if (std::abs(v[c]) >= beta_n) sets.coords.push_back(c);
    }
  }
  std::sort(sets.coords.begin(), sets.coords.end());
  return sets;
}

// Cardinality hint from the group-level envelope: clamp of (m_G/alpha_n)^r.
inline int lemma1_cardinality_hint(const SparsityModel& model, double alpha_n) {
  model.validate();
  if (alpha_n <= 0.0) return static_cast<int>(model.num_groups);
  const double bound = std::pow(model.m_G / alpha_n, model.r);
  const double clamped = std::min(bound, model.num_groups);
  return std::max(1, static_cast<int>(std::floor(clamped)));
}

struct Lemma1Bounds {
  double bound_groups = 0.0;  // (m_G/alpha_n)^r ^ G
  double bound_coords = 0.0;  // T|G| ^ (m_(|G|)/beta_n)^r
};

// Right-hand sides of the oracle-set cardinality bounds. When the true |G|
// is not supplied, the group bound itself stands in for it, which keeps both
// results valid upper bounds because m_(g) is non-decreasing in g.
inline Lemma1Bounds lemma1_bounds(const SparsityModel& model, double alpha_n, double beta_n,
                                  int cardinality = 0) {
  model.validate();
  if (!(alpha_n > 0.0) || !(beta_n > 0.0))
    fail(ErrorCode::DomainError, "lemma1_bounds: thresholds must be > 0");
  Lemma1Bounds bounds;
  bounds.bound_groups = std::min(std::pow(model.m_G / alpha_n, model.r), model.num_groups);
  const double card = cardinality >= 1 ? static_cast<double>(cardinality)
                                       : std::max(1.0, bounds.bound_groups);
  const int index = static_cast<int>(std::ceil(card));
  bounds.bound_coords = std::min(model.group_size * card,
                                 std::pow(model.m_at(index) / beta_n, model.r));
  return bounds;
}

struct IterationThresholds {
  double eta_n = 0.0;  // group-wise iteration level
  double tau_n = 0.0;  // entry-wise iteration level
};

// eta_n = eta * alpha_n / sqrt(T), tau_n = tau * beta_n; these feed the
// solver's ThresholdSchedule for oracle-tuned runs.
inline IterationThresholds iteration_thresholds(const SparsityModel& model, double alpha_n,
                                                double beta_n) {
  model.validate();
  if (alpha_n < 0.0 || beta_n < 0.0)
    fail(ErrorCode::DomainError, "iteration_thresholds: thresholds must be >= 0");
  return {model.eta * alpha_n / std::sqrt(model.group_size), model.tau * beta_n};
}

struct RateBound {
  double group_term = 0.0;       // ((m_G/alpha_n)^r ^ G) alpha_n^2
  double entry_term = 0.0;       // ((m_(|G|)/beta_n)^r ^ T(m_G/alpha_n)^r) beta_n^2
  double parametric_term = 0.0;  // (lambda^4+lambda^2+1)/lambda^4 * log G / n

  double total() const { return group_term + entry_term + parametric_term; }
};

// Evaluates the error-rate bound with its implicit constant taken as 1;
// intended for trend diagnostics, never absolute comparisons. The |G|
// entering beta_n comes from the Lemma 1 hint (two-pass evaluation).
inline RateBound theorem1_rate(const SparsityModel& model) {
  model.validate();
  const double h = snr(model.lambda_sq);
  const double n = model.sample_size;
  const double alpha_n = model.alpha * std::sqrt(std::log(model.num_groups) / (n * h));
  const int card = lemma1_cardinality_hint(model, alpha_n);
  const double beta_n =
      model.beta *
      std::sqrt(std::log(model.group_size * static_cast<double>(card)) / (n * h));

  RateBound rate;
  if (alpha_n > 0.0) {
    rate.group_term =
        std::min(std::pow(model.m_G / alpha_n, model.r), model.num_groups) * alpha_n * alpha_n;
  }
  if (beta_n > 0.0) {
    const double group_ratio = alpha_n > 0.0 ? std::pow(model.m_G / alpha_n, model.r)
                                             : std::numeric_limits<double>::infinity();
    rate.entry_term = std::min(std::pow(model.m_at(card) / beta_n, model.r),
                               model.group_size * group_ratio) *
                      beta_n * beta_n;
  }
  const double l2 = model.lambda_sq;
  rate.parametric_term = (l2 * l2 + l2 + 1.0) / (l2 * l2) * std::log(model.num_groups) / n;
  return rate;
}

}  // namespace sgpca
