#pragma once

#include <cmath>

#include "sgpca/error.hpp"
#include "sgpca/types.hpp"

namespace sgpca {

// Proximal operator of lambda*|y|: (1 - lambda/|x|)_+ x.
inline double soft_threshold(double x, double lambda) {
  const double magnitude = std::abs(x);
  if (magnitude <= lambda) return 0.0;
  return (1.0 - lambda / magnitude) * x;
}

// Proximal operator of lambda*||y||_2: (1 - lambda/||x||_2)_+ x.
// ||x|| == lambda maps to zero; the zero vector maps to itself.
inline Vector block_soft_threshold(const Vector& x, double lambda) {
  const double norm = x.norm();
  if (norm <= lambda) return Vector::Zero(x.size());
  return (1.0 - lambda / norm) * x;
}

// Squared Frobenius distance between the rank-one projectors spanned by v1
// and v2, equal to 2*sin^2(theta). Computed from inner products, never by
// materializing the p x p projectors. Scale and sign-flip invariant.
inline double subspace_distance(const Vector& v1, const Vector& v2) {
  if (v1.size() != v2.size())
    fail(ErrorCode::DimensionMismatch, "subspace_distance: dimension mismatch");
  const double n1 = v1.norm();
  const double n2 = v2.norm();
  if (n1 == 0.0 || n2 == 0.0)
    fail(ErrorCode::DegenerateVector, "subspace_distance: zero vector");
  const double cosine = v1.dot(v2) / (n1 * n2);
  const double cos_sq = std::min(1.0, cosine * cosine);
  return 2.0 * (1.0 - cos_sq);
}

// Flips v so its largest-magnitude entry is positive (ties: lowest index).
inline void canonicalize_sign(Vector& v) {
  int arg = -1;
  double best = -1.0;
  for (int i = 0; i < v.size(); ++i) {
    const double magnitude = std::abs(v[i]);
    if (magnitude > best) {
      best = magnitude;
      arg = i;
    }
  }
  if (arg >= 0 && v[arg] < 0.0) v = -v;
}

}  // namespace sgpca
