#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "sgpca/error.hpp"

namespace sgpca {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Samples-by-features data, rows are samples. Entries must be finite.
// Operations that estimate covariance (CovOperator, subsample, the
// initializer) additionally require n >= 2.
class DataMatrix {
 public:
  explicit DataMatrix(Matrix values, std::vector<std::string> column_names = {})
      : values_(std::move(values)), column_names_(std::move(column_names)) {
    if (values_.rows() < 1 || values_.cols() < 1)
      fail(ErrorCode::DataError, "DataMatrix: need at least one row and one column");
    if (!values_.allFinite())
      fail(ErrorCode::DataError, "DataMatrix: non-finite entry");
    if (!column_names_.empty() &&
        column_names_.size() != static_cast<std::size_t>(values_.cols()))
      fail(ErrorCode::DataError, "DataMatrix: column name count does not match p");
  }

  int n() const { return static_cast<int>(values_.rows()); }
  int p() const { return static_cast<int>(values_.cols()); }
  const Matrix& values() const { return values_; }
  const std::vector<std::string>& column_names() const { return column_names_; }

 private:
  Matrix values_;
  std::vector<std::string> column_names_;
};

// Disjoint cover of the feature indices [0, p) into G named groups.
class GroupPartition {
 public:
  explicit GroupPartition(std::vector<std::vector<int>> groups,
                          std::vector<std::string> names = {})
      : groups_(std::move(groups)), names_(std::move(names)) {
    if (groups_.empty()) fail(ErrorCode::DataError, "GroupPartition: no groups");
    int p = 0;
    for (const auto& g : groups_) {
      if (g.empty()) fail(ErrorCode::DataError, "GroupPartition: empty group");
      p += static_cast<int>(g.size());
    }
    std::vector<int> owner(static_cast<std::size_t>(p), -1);
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      for (int column : groups_[g]) {
        if (column < 0 || column >= p)
          fail(ErrorCode::DataError,
               "GroupPartition: column " + std::to_string(column) + " out of range");
        if (owner[static_cast<std::size_t>(column)] != -1)
          fail(ErrorCode::DataError,
               "GroupPartition: column " + std::to_string(column) + " assigned twice");
        owner[static_cast<std::size_t>(column)] = static_cast<int>(g);
      }
    }
    // every p_g >= 1 and sum p_g == p, so the cover is exact iff no gaps
    for (int c = 0; c < p; ++c)
      if (owner[static_cast<std::size_t>(c)] == -1)
        fail(ErrorCode::DataError,
             "GroupPartition: column " + std::to_string(c) + " not covered");
    owner_ = std::move(owner);
    if (names_.empty()) {
      names_.reserve(groups_.size());
      for (std::size_t g = 0; g < groups_.size(); ++g)
        names_.push_back("g" + std::to_string(g + 1));
    } else if (names_.size() != groups_.size()) {
      fail(ErrorCode::DataError, "GroupPartition: name count does not match G");
    }
  }

  // G consecutive blocks of equal size, the layout of the simulation settings.
  static GroupPartition equal_blocks(int num_groups, int group_size) {
    if (num_groups < 1 || group_size < 1)
      fail(ErrorCode::DataError, "equal_blocks: sizes must be positive");
    std::vector<std::vector<int>> groups(static_cast<std::size_t>(num_groups));
    int column = 0;
    for (auto& g : groups) {
      g.resize(static_cast<std::size_t>(group_size));
      for (int& c : g) c = column++;
    }
    return GroupPartition(std::move(groups));
  }

  int num_groups() const { return static_cast<int>(groups_.size()); }
  int dim() const { return static_cast<int>(owner_.size()); }
  const std::vector<int>& group(int g) const { return groups_[static_cast<std::size_t>(g)]; }
  int size(int g) const { return static_cast<int>(groups_[static_cast<std::size_t>(g)].size()); }
  int group_of(int column) const { return owner_[static_cast<std::size_t>(column)]; }
  const std::string& name(int g) const { return names_[static_cast<std::size_t>(g)]; }

 private:
  std::vector<std::vector<int>> groups_;
  std::vector<std::string> names_;
  std::vector<int> owner_;
};

// Per-component (eta_j, tau_j) thresholding levels for the solver.
struct ThresholdPair {
  double eta = 0.0;
  double tau = 0.0;
};

class ThresholdSchedule {
 public:
  explicit ThresholdSchedule(std::vector<ThresholdPair> pairs) : pairs_(std::move(pairs)) {
    if (pairs_.empty()) fail(ErrorCode::DataError, "ThresholdSchedule: empty");
    for (const auto& pair : pairs_)
      if (!(pair.eta >= 0.0) || !(pair.tau >= 0.0))
        fail(ErrorCode::DataError, "ThresholdSchedule: thresholds must be >= 0");
  }

  int size() const { return static_cast<int>(pairs_.size()); }
  const ThresholdPair& operator[](int j) const { return pairs_[static_cast<std::size_t>(j)]; }

 private:
  std::vector<ThresholdPair> pairs_;
};

// One estimated component: unit-norm loading in canonical sign (largest
// magnitude entry positive, ties broken by lowest index), its support, the
// Rayleigh-quotient variance at the final iterate, and iteration diagnostics.
struct PCEstimate {
  Vector loading;
  std::vector<int> support;
  std::vector<int> active_groups;
  double variance = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> rayleigh_trace;  // filled when SolverConfig::record_trace
};

}  // namespace sgpca
