#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sgpca/error.hpp"
#include "sgpca/types.hpp"

namespace sgpca {

inline Matrix centered_columns(const Matrix& x) {
  return x.rowwise() - x.colwise().mean();
}

// The (possibly deflated) sample covariance as a linear operator.
//
// Implicit mode keeps the data matrix and applies u -> (1/n) X'(Xu) in
// O(np); explicit mode keeps a dense symmetric p x p matrix. Deflation has
// two forms:
//   Covariance (default): S <- S - (v'Sv) vv', kept as a list of (v, rho)
//     pairs so each apply costs O(p) extra per deflation.
//   Data: X <- X - (Xv)v' in implicit mode, S <- (I-vv')S(I-vv') in
//     explicit mode. The two forms do not agree in general.
class CovOperator {
 public:
  enum class DeflationMode { Covariance, Data };

  static CovOperator from_data(const DataMatrix& data, bool center = true,
                               DeflationMode deflation_mode = DeflationMode::Covariance) {
    if (data.n() < 2)
      fail(ErrorCode::DataError, "CovOperator: need at least 2 samples, got " +
                                     std::to_string(data.n()));
    CovOperator op;
    op.deflation_mode_ = deflation_mode;
    op.data_ = center ? centered_columns(data.values()) : data.values();
    op.samples_ = data.n();
    op.dim_ = data.p();
    op.implicit_ = true;
    return op;
  }

  static CovOperator from_matrix(Matrix sigma,
                                 DeflationMode deflation_mode = DeflationMode::Covariance) {
    if (sigma.rows() != sigma.cols() || sigma.rows() < 1)
      fail(ErrorCode::DataError, "CovOperator: explicit matrix must be square");
    if (!sigma.allFinite())
      fail(ErrorCode::DataError, "CovOperator: non-finite entry in explicit matrix");
    CovOperator op;
    op.deflation_mode_ = deflation_mode;
    op.dim_ = static_cast<int>(sigma.rows());
    op.sigma_ = std::move(sigma);
    op.implicit_ = false;
    return op;
  }

  int dim() const { return dim_; }
  bool is_implicit() const { return implicit_; }
  DeflationMode deflation_mode() const { return deflation_mode_; }
  const std::vector<std::pair<Vector, double>>& deflations() const { return deflations_; }

  Vector apply(const Vector& u) const {
    if (u.size() != dim_)
      fail(ErrorCode::DimensionMismatch,
           "cov_apply: vector has dimension " + std::to_string(u.size()) +
               ", operator expects " + std::to_string(dim_));
    Vector result;
    if (implicit_) {
      result = data_.transpose() * (data_ * u);
      result /= static_cast<double>(samples_);
    } else {
      result = sigma_ * u;
    }
    for (const auto& [direction, rho] : deflations_)
      result -= rho * direction.dot(u) * direction;
    return result;
  }

  double quadratic_form(const Vector& u) const { return u.dot(apply(u)); }

  // Diagonal of the current operator, O(np + p * #deflations).
  Vector diagonal() const {
    Vector diag(dim_);
    if (implicit_) {
      diag = data_.colwise().squaredNorm().transpose() / static_cast<double>(samples_);
    } else {
      diag = sigma_.diagonal();
    }
    for (const auto& [direction, rho] : deflations_)
      diag -= rho * direction.cwiseProduct(direction);
    return diag;
  }

  // Removes the component along v from the operator, per deflation_mode.
  void deflate(const Vector& v) {
    if (v.size() != dim_)
      fail(ErrorCode::DimensionMismatch, "deflate: dimension mismatch");
    if (deflation_mode_ == DeflationMode::Covariance) {
      const double rho = quadratic_form(v);
      deflations_.emplace_back(v, rho);
      return;
    }
    if (implicit_) {
      data_ -= (data_ * v) * v.transpose();
    } else {
      const Vector sv = sigma_ * v;
      const double vsv = v.dot(sv);
      sigma_ -= v * sv.transpose() + sv * v.transpose();
      sigma_ += vsv * v * v.transpose();
    }
  }

  int num_deflations() const { return static_cast<int>(deflations_.size()); }

  // Materializes the current operator; intended for small p (tests, oracles).
  Matrix dense() const {
    Matrix s;
    if (implicit_) {
      s = data_.transpose() * data_ / static_cast<double>(samples_);
    } else {
      s = sigma_;
    }
    for (const auto& [direction, rho] : deflations_)
      s -= rho * direction * direction.transpose();
    return s;
  }

  // The |B| x |B| principal submatrix of the current operator on the given
  // columns, O(n|B|^2 + |B|^2 #deflations) in implicit mode.
  Matrix dense_submatrix(const std::vector<int>& columns) const {
    const int b = static_cast<int>(columns.size());
    Matrix s(b, b);
    if (implicit_) {
      Matrix slice(samples_, b);
      for (int i = 0; i < b; ++i) slice.col(i) = data_.col(columns[static_cast<std::size_t>(i)]);
      s = slice.transpose() * slice / static_cast<double>(samples_);
    } else {
      for (int i = 0; i < b; ++i)
        for (int j = 0; j < b; ++j)
          s(i, j) = sigma_(columns[static_cast<std::size_t>(i)],
                           columns[static_cast<std::size_t>(j)]);
    }
    for (const auto& [direction, rho] : deflations_) {
      Vector restricted(b);
      for (int i = 0; i < b; ++i) restricted[i] = direction[columns[static_cast<std::size_t>(i)]];
      s -= rho * restricted * restricted.transpose();
    }
    return s;
  }

 private:
  CovOperator() = default;

  bool implicit_ = false;
  DeflationMode deflation_mode_ = DeflationMode::Covariance;
  int dim_ = 0;
  int samples_ = 0;
  Matrix data_;   // implicit mode, centered if requested
  Matrix sigma_;  // explicit mode
  std::vector<std::pair<Vector, double>> deflations_;
};

inline Vector cov_apply(const CovOperator& op, const Vector& u) { return op.apply(u); }

}  // namespace sgpca
