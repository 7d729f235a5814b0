#pragma once

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <vector>

#include "sgpca/cov_operator.hpp"
#include "sgpca/error.hpp"
#include "sgpca/operators.hpp"
#include "sgpca/types.hpp"

namespace sgpca {

struct InitConfig {
  // Pilot-calibrated defaults for the paper's simulation scale; both are
  // exposed because the right magnitude depends on n and the noise floor.
  double pi_const = 1.5;
  double omega_const = 0.3;

  void validate() const {
    if (!(pi_const > 0.0) || !(omega_const > 0.0))
      fail(ErrorCode::DomainError, "InitConfig: constants must be > 0");
  }
};

struct InitResult {
  Vector loading;                     // unit norm, supported on selected_columns
  std::vector<int> selected_groups;   // B_G
  std::vector<int> selected_columns;  // B
  bool used_fallback = false;
};

namespace detail {

// Group rule: sum of within-group diagonal entries >= p_g + pi_n. The null
// mean of the statistic is p_g, so unequal group sizes replace the equal-size
// constant T by p_g.
inline std::vector<int> select_groups(const Vector& moments, const GroupPartition& partition,
                                      double pi_n) {
  std::vector<int> selected;
  for (int g = 0; g < partition.num_groups(); ++g) {
    double statistic = 0.0;
    for (int c : partition.group(g)) statistic += moments[c];
    if (statistic >= static_cast<double>(partition.size(g)) + pi_n) selected.push_back(g);
  }
  return selected;
}

inline std::vector<int> select_columns(const Vector& moments, const GroupPartition& partition,
                                       const std::vector<int>& selected_groups, double omega_n) {
  std::vector<int> selected;
  for (int g : selected_groups)
    for (int c : partition.group(g))
      if (moments[c] >= 1.0 + omega_n) selected.push_back(c);
  std::sort(selected.begin(), selected.end());
  return selected;
}

}  // namespace detail

// Modified diagonal thresholding against a covariance operator: select
// groups whose summed diagonal exceeds p_g + pi_n with pi_n =
// pi * sqrt(log G / n), then columns within them exceeding 1 + omega_n with
// omega_n = omega * sqrt(log |Psi(B_G)| / n), then take the leading
// eigenvector of the |B| x |B| submatrix, zero-padded to length p. Running
// this on a deflated operator initializes later components: spent directions
// fall back to the noise floor of the diagonal and drop out of selection.
// An empty selection falls back to a 1-sparse init at the column of largest
// diagonal (lowest index on ties).
inline InitResult diagonal_threshold_init(const CovOperator& op, const GroupPartition& partition,
                                          const InitConfig& config, int samples) {
  config.validate();
  if (samples < 2) fail(ErrorCode::DataError, "diagonal_threshold_init: need at least 2 samples");
  if (op.dim() != partition.dim())
    fail(ErrorCode::DimensionMismatch,
         "diagonal_threshold_init: partition does not match operator");

  const Vector moments = op.diagonal();
  const double n = static_cast<double>(samples);
  const double pi_n =
      config.pi_const * std::sqrt(std::log(static_cast<double>(partition.num_groups())) / n);

  InitResult result;
  result.selected_groups = detail::select_groups(moments, partition, pi_n);

  auto fallback = [&]() {
    int arg = 0;
    for (int c = 1; c < op.dim(); ++c)
      if (moments[c] > moments[arg]) arg = c;
    result.loading = Vector::Zero(op.dim());
    result.loading[arg] = 1.0;
    result.selected_columns = {arg};
    result.selected_groups.clear();
    result.used_fallback = true;
    return result;
  };

  // |B_G| = 0 leaves omega_n undefined; the fallback fires before stage 2.
  if (result.selected_groups.empty()) return fallback();

  int candidate_count = 0;
  for (int g : result.selected_groups) candidate_count += partition.size(g);
  const double omega_n =
      config.omega_const * std::sqrt(std::log(static_cast<double>(candidate_count)) / n);
  result.selected_columns =
      detail::select_columns(moments, partition, result.selected_groups, omega_n);
  if (result.selected_columns.empty()) return fallback();

  const Matrix reduced = op.dense_submatrix(result.selected_columns);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(reduced);
  const Vector leading = solver.eigenvectors().col(reduced.cols() - 1);

  result.loading = Vector::Zero(op.dim());
  for (std::size_t i = 0; i < result.selected_columns.size(); ++i)
    result.loading[result.selected_columns[i]] = leading[static_cast<int>(i)];
  result.loading.normalize();
  canonicalize_sign(result.loading);
  return result;
}

inline InitResult diagonal_threshold_init(const DataMatrix& data, const GroupPartition& partition,
                                          const InitConfig& config, bool center = true) {
  if (data.n() < 2)
    fail(ErrorCode::DataError, "diagonal_threshold_init: need at least 2 samples");
  const CovOperator op = CovOperator::from_data(data, center);
  return diagonal_threshold_init(op, partition, config, data.n());
}

}  // namespace sgpca
