#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sgpca/cov_operator.hpp"
#include "sgpca/error.hpp"
#include "sgpca/init.hpp"
#include "sgpca/operators.hpp"
#include "sgpca/types.hpp"

namespace sgpca {

struct SolverConfig {
  double tol = 1e-5;
  int max_iter = 1000;
  int components = 1;  // J
  bool record_trace = false;

  void validate() const {
    if (!(tol > 0.0)) fail(ErrorCode::DomainError, "SolverConfig: tol must be > 0");
    if (max_iter < 1) fail(ErrorCode::DomainError, "SolverConfig: max_iter must be >= 1");
    if (components < 1) fail(ErrorCode::DomainError, "SolverConfig: components must be >= 1");
  }
};

namespace detail {

// Group-wise bst with level sqrt(p_g)*eta, then entry-wise st with tau,
// applied in place. Group index sets need not be contiguous.
inline void double_threshold(Vector& gamma, const GroupPartition& partition, double eta,
                             double tau) {
  for (int g = 0; g < partition.num_groups(); ++g) {
    const auto& columns = partition.group(g);
    double sum_sq = 0.0;
    for (int c : columns) sum_sq += gamma[c] * gamma[c];
    const double norm = std::sqrt(sum_sq);
    const double level = std::sqrt(static_cast<double>(columns.size())) * eta;
    if (norm <= level) {
      for (int c : columns) gamma[c] = 0.0;
      continue;
    }
    const double shrink = 1.0 - level / norm;
    for (int c : columns) gamma[c] = soft_threshold(shrink * gamma[c], tau);
  }
}

inline void finalize_estimate(PCEstimate& estimate, const CovOperator& op,
                              const GroupPartition& partition) {
  canonicalize_sign(estimate.loading);
  estimate.support.clear();
  std::vector<bool> group_active(static_cast<std::size_t>(partition.num_groups()), false);
  for (int c = 0; c < estimate.loading.size(); ++c) {
    if (estimate.loading[c] != 0.0) {
      estimate.support.push_back(c);
      group_active[static_cast<std::size_t>(partition.group_of(c))] = true;
    }
  }
  estimate.active_groups.clear();
  for (int g = 0; g < partition.num_groups(); ++g)
    if (group_active[static_cast<std::size_t>(g)]) estimate.active_groups.push_back(g);
  estimate.variance = op.quadratic_form(estimate.loading);
}

}  // namespace detail

// One pass of the double-thresholding power iteration: multiply by the
// (deflated) covariance operator, group-threshold, entry-threshold,
// normalize, until the subspace distance between successive normalized
// iterates drops below tol. With eta = tau = 0 this is classical power
// iteration. A fully zeroed iterate raises threshold-too-large; hitting
// max_iter returns the last iterate with converged = false.
inline PCEstimate fit_component(const CovOperator& op, const GroupPartition& partition,
                                double eta, double tau, const Vector& init,
                                const SolverConfig& config) {
  config.validate();
  if (!(eta >= 0.0) || !(tau >= 0.0))
    fail(ErrorCode::DomainError, "fit_component: thresholds must be >= 0");
  if (init.size() != op.dim())
    fail(ErrorCode::DimensionMismatch, "fit_component: init has wrong dimension");
  if (partition.dim() != op.dim())
    fail(ErrorCode::DimensionMismatch, "fit_component: partition does not match operator");
  const double init_norm = init.norm();
  if (init_norm == 0.0) fail(ErrorCode::DegenerateVector, "fit_component: zero init");

  PCEstimate estimate;
  Vector v = init / init_norm;
  for (int k = 1; k <= config.max_iter; ++k) {
    Vector gamma = op.apply(v);
    if (config.record_trace) estimate.rayleigh_trace.push_back(v.dot(gamma));
    detail::double_threshold(gamma, partition, eta, tau);
    const double norm = gamma.norm();
    if (norm == 0.0)
      fail(ErrorCode::ThresholdTooLarge,
           "fit_component: thresholds (eta=" + std::to_string(eta) +
               ", tau=" + std::to_string(tau) + ") zeroed the iterate at iteration " +
               std::to_string(k));
    gamma /= norm;
    const double distance = subspace_distance(gamma, v);
    v = gamma;
    estimate.iterations = k;
    if (distance <= config.tol) {
      estimate.converged = true;
      break;
    }
  }
  estimate.loading = v;
  detail::finalize_estimate(estimate, op, partition);
  return estimate;
}

// Sequential extraction of schedule.size() components with deflation of the
// operator after each. Errors from fit_component are annotated with the
// 1-based component index.
inline std::vector<PCEstimate> fit(CovOperator& op, const GroupPartition& partition,
                                   const ThresholdSchedule& schedule,
                                   const std::vector<Vector>& inits, const SolverConfig& config) {
  config.validate();
  if (schedule.size() != config.components ||
      inits.size() != static_cast<std::size_t>(config.components))
    fail(ErrorCode::DimensionMismatch, "fit: schedule and inits must have length J");
  std::vector<PCEstimate> estimates;
  estimates.reserve(static_cast<std::size_t>(config.components));
  for (int j = 0; j < config.components; ++j) {
    try {
      estimates.push_back(fit_component(op, partition, schedule[j].eta, schedule[j].tau,
                                        inits[static_cast<std::size_t>(j)], config));
    } catch (const Error& e) {
      fail(e.code(), "component " + std::to_string(j + 1) + ": " + e.what());
    }
    op.deflate(estimates.back().loading);
  }
  return estimates;
}

inline std::vector<PCEstimate> fit(const DataMatrix& data, const GroupPartition& partition,
                                   const ThresholdSchedule& schedule,
                                   const std::vector<Vector>& inits, const SolverConfig& config,
                                   bool center = true,
                                   CovOperator::DeflationMode deflation_mode =
                                       CovOperator::DeflationMode::Covariance) {
  CovOperator op = CovOperator::from_data(data, center, deflation_mode);
  return fit(op, partition, schedule, inits, config);
}

// fit with per-component diagonal-thresholding initialization: the init for
// component j runs against the operator deflated by components 1..j-1, so
// spent directions drop out of the selection rules.
inline std::vector<PCEstimate> fit_with_init(CovOperator& op, const GroupPartition& partition,
                                             const ThresholdSchedule& schedule,
                                             const SolverConfig& config,
                                             const InitConfig& init_config, int samples) {
  config.validate();
  if (schedule.size() != config.components)
    fail(ErrorCode::DimensionMismatch, "fit_with_init: schedule must have length J");
  std::vector<PCEstimate> estimates;
  estimates.reserve(static_cast<std::size_t>(config.components));
  for (int j = 0; j < config.components; ++j) {
    const InitResult init = diagonal_threshold_init(op, partition, init_config, samples);
    try {
      estimates.push_back(
          fit_component(op, partition, schedule[j].eta, schedule[j].tau, init.loading, config));
    } catch (const Error& e) {
      fail(e.code(), "component " + std::to_string(j + 1) + ": " + e.what());
    }
    op.deflate(estimates.back().loading);
  }
  return estimates;
}

namespace detail {

// Basis vectors at the J largest diagonal entries (ties: lowest index).
inline Matrix default_subspace_init(const CovOperator& op, int num_components) {
  const Vector diag = op.diagonal();
  std::vector<int> order(static_cast<std::size_t>(diag.size()));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(),
                   [&diag](int a, int b) { return diag[a] > diag[b]; });
  Matrix block = Matrix::Zero(op.dim(), num_components);
  for (int j = 0; j < num_components; ++j) block(order[static_cast<std::size_t>(j)], j) = 1.0;
  return block;
}

}  // namespace detail

// Orthogonal iteration with the double-thresholding step applied column-wise
// under a single shared (eta, tau) pair. The block is re-orthonormalized each
// iteration by Householder QR (no pivoting) with the R diagonal forced
// positive, so runs are reproducible. No deflation of previously found
// components is performed.
inline std::vector<PCEstimate> fit_subspace(const CovOperator& op,
                                            const GroupPartition& partition, double eta,
                                            double tau, int num_components,
                                            const SolverConfig& config,
                                            const Matrix* init_block = nullptr) {
  config.validate();
  if (!(eta >= 0.0) || !(tau >= 0.0))
    fail(ErrorCode::DomainError, "fit_subspace: thresholds must be >= 0");
  if (num_components < 1 || num_components > op.dim())
    fail(ErrorCode::DomainError, "fit_subspace: component count out of range");
  const int p = op.dim();
  const int J = num_components;

  Matrix v = init_block ? *init_block : detail::default_subspace_init(op, J);
  if (v.rows() != p || v.cols() != J)
    fail(ErrorCode::DimensionMismatch, "fit_subspace: init block has wrong shape");
  {
    Eigen::HouseholderQR<Matrix> qr(v);
    v = qr.householderQ() * Matrix::Identity(p, J);
  }

  int iterations = 0;
  bool converged = false;
  for (int k = 1; k <= config.max_iter; ++k) {
    Matrix gamma(p, J);
    for (int j = 0; j < J; ++j) {
      Vector column = op.apply(v.col(j));
      detail::double_threshold(column, partition, eta, tau);
      gamma.col(j) = column;
    }
    Eigen::HouseholderQR<Matrix> qr(gamma);
    const Matrix r = qr.matrixQR().topRows(J).triangularView<Eigen::Upper>();
    const double scale = std::abs(r(0, 0));
    for (int j = 0; j < J; ++j)
      if (std::abs(r(j, j)) <= 1e-12 * (1.0 + scale))
        fail(ErrorCode::RankCollapse,
             "fit_subspace: thresholding made the block rank-deficient at iteration " +
                 std::to_string(k));
    Matrix next = qr.householderQ() * Matrix::Identity(p, J);
    for (int j = 0; j < J; ++j)
      if (r(j, j) < 0.0) next.col(j) = -next.col(j);
    // projector distance: ||V V' - W W'||_F^2 = 2J - 2||V'W||_F^2
    const double distance =
        std::max(0.0, 2.0 * J - 2.0 * (v.transpose() * next).squaredNorm());
    v = next;
    iterations = k;
    if (distance <= config.tol) {
      converged = true;
      break;
    }
  }

  std::vector<PCEstimate> estimates(static_cast<std::size_t>(J));
  for (int j = 0; j < J; ++j) {
    auto& estimate = estimates[static_cast<std::size_t>(j)];
    estimate.loading = v.col(j);
    estimate.iterations = iterations;
    estimate.converged = converged;
    detail::finalize_estimate(estimate, op, partition);
  }
  return estimates;
}

inline std::vector<PCEstimate> fit_subspace(const DataMatrix& data,
                                            const GroupPartition& partition, double eta,
                                            double tau, int num_components,
                                            const SolverConfig& config, bool center = true) {
  if (num_components > std::min(data.n(), data.p()))
    fail(ErrorCode::DomainError, "fit_subspace: J exceeds min(n, p)");
  const CovOperator op = CovOperator::from_data(data, center);
  return fit_subspace(op, partition, eta, tau, num_components, config);
}

}  // namespace sgpca
