#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <vector>

#include "sgpca/rng.hpp"
#include "sgpca/types.hpp"

namespace sgpca::testing {

inline Matrix random_gaussian(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

inline Vector random_unit(int dim, std::uint64_t seed) {
  Rng rng(seed);
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = rng.normal();
  return v / v.norm();
}

// Random orthogonal basis via Householder QR of a Gaussian matrix.
inline Matrix random_orthogonal(int dim, std::uint64_t seed) {
  const Matrix g = random_gaussian(dim, dim, seed);
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(dim, dim);
}

// PSD matrix with a controlled top gap: leading eigenvalue fixed, the bulk
// uniform below it, in a random orthogonal basis.
inline Matrix random_psd(int dim, std::uint64_t seed, double leading = 1.5,
                         double second = 1.0) {
  Rng rng(Rng(seed).derive(7).key());
  Vector eigenvalues(dim);
  eigenvalues[0] = leading;
  for (int i = 1; i < dim; ++i) eigenvalues[i] = second * rng.uniform();
  if (dim > 1) eigenvalues[1] = second;  // pin the gap
  const Matrix q = random_orthogonal(dim, Rng(seed).derive(8).key());
  return q * eigenvalues.asDiagonal() * q.transpose();
}

// Leading eigenvector of a symmetric matrix via the dense eigensolver.
inline Vector dense_leading_eigenvector(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(s);
  return solver.eigenvectors().col(s.cols() - 1);
}

inline Matrix dense_top_projector(const Matrix& s, int k) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(s);
  const Matrix basis = solver.eigenvectors().rightCols(k);
  return basis * basis.transpose();
}

// Weak-l_{G,r} test vector: group g gets norm m_G * g^(-1/r), entries inside
// each group decay like t^(-1/r) with seeded random signs, then the whole
// vector is normalized. With m_G >= 1 the pre-normalization norm is >= 1, so
// normalization only shrinks magnitudes and the envelope is preserved.
inline Vector make_weak_lr_vector(const GroupPartition& partition, double r, double m_G,
                                  std::uint64_t seed) {
  Rng rng(seed);
  Vector v = Vector::Zero(partition.dim());
  for (int g = 0; g < partition.num_groups(); ++g) {
    const auto& columns = partition.group(g);
    Vector block(static_cast<int>(columns.size()));
    for (int t = 0; t < block.size(); ++t)
      block[t] = std::pow(static_cast<double>(t + 1), -1.0 / r) * rng.rademacher();
    block *= m_G * std::pow(static_cast<double>(g + 1), -1.0 / r) / block.norm();
    for (std::size_t t = 0; t < columns.size(); ++t)
      v[columns[t]] = block[static_cast<int>(t)];
  }
  v /= v.norm();
  return v;
}

// Post-hoc envelope constants of an arbitrary vector: the smallest m_G with
// sorted group norms <= m_G * g^(-1/r), and the smallest m covering the
// sorted entry magnitudes of the top-g groups for every g (returned as the
// overall max, valid for every m_(g) since it is non-decreasing in g).
inline double posthoc_group_radius(const Vector& v, const GroupPartition& partition, double r) {
  std::vector<double> norms;
  for (int g = 0; g < partition.num_groups(); ++g) {
    double sum_sq = 0.0;
    for (int c : partition.group(g)) sum_sq += v[c] * v[c];
    norms.push_back(std::sqrt(sum_sq));
  }
  std::sort(norms.rbegin(), norms.rend());
  double radius = 0.0;
  for (std::size_t g = 0; g < norms.size(); ++g)
    radius = std::max(radius, norms[g] * std::pow(static_cast<double>(g + 1), 1.0 / r));
  return radius;
}

inline double posthoc_entry_radius(const Vector& v, double r) {
  std::vector<double> magnitudes(static_cast<std::size_t>(v.size()));
  for (int i = 0; i < v.size(); ++i) magnitudes[static_cast<std::size_t>(i)] = std::abs(v[i]);
  std::sort(magnitudes.rbegin(), magnitudes.rend());
  double radius = 0.0;
  for (std::size_t j = 0; j < magnitudes.size(); ++j)
    radius = std::max(radius, magnitudes[j] * std::pow(static_cast<double>(j + 1), 1.0 / r));
  return radius;
}

inline double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t count = values.size();
  return count % 2 == 1 ? values[count / 2]
                        : 0.5 * (values[count / 2 - 1] + values[count / 2]);
}

}  // namespace sgpca::testing
