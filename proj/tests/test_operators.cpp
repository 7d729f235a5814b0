#include <gtest/gtest.h>

#include <cmath>

#include "sgpca/operators.hpp"
#include "sgpca/rng.hpp"
#include "support/test_helpers.hpp"

using namespace sgpca;

namespace {

// Independent oracle: grid-minimize 0.5*(y-x)^2 + lambda*|y| over a fine grid.
double soft_threshold_oracle(double x, double lambda) {
  double best_y = 0.0, best_value = 0.5 * x * x;
  for (double y = -4.0; y <= 4.0; y += 1e-4) {
    const double value = 0.5 * (y - x) * (y - x) + lambda * std::abs(y);
    if (value < best_value) {
      best_value = value;
      best_y = y;
    }
  }
  return best_y;
}

// Independent oracle: the block minimizer lies on the ray through x, so
// grid-minimize 0.5*||t*x - x||^2 + lambda*||t*x|| over the scale t.
Vector block_soft_threshold_oracle(const Vector& x, double lambda) {
  const double norm = x.norm();
  double best_t = 0.0, best_value = 0.5 * norm * norm;
  for (double t = 0.0; t <= 2.0; t += 1e-6) {
    const double value = 0.5 * (t - 1.0) * (t - 1.0) * norm * norm + lambda * t * norm;
    if (value < best_value) {
      best_value = value;
      best_t = t;
    }
  }
  return best_t * x;
}

}  // namespace

TEST(SoftThreshold, MatchesPenalizedLeastSquaresOracle) {
  // frozen from the grid oracle: argmin 0.5(y-2)^2 + 0.5|y| = 1.5
  EXPECT_NEAR(soft_threshold_oracle(2.0, 0.5), 1.5, 1e-3);
  EXPECT_DOUBLE_EQ(soft_threshold(2.0, 0.5), 1.5);
}

TEST(SoftThreshold, ZeroesBelowThreshold) {
  EXPECT_DOUBLE_EQ(soft_threshold(0.3, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(soft_threshold(0.0, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(soft_threshold(-0.5, 0.5), 0.0);  // equality maps to zero
}

TEST(SoftThreshold, ZeroThresholdIsIdentity) {
  EXPECT_DOUBLE_EQ(soft_threshold(-7.0, 0.0), -7.0);
}

TEST(BlockSoftThreshold, NormAtOrBelowLevelGivesZero) {
  Vector x(2);
  x << 3.0, 4.0;  // norm 5
  EXPECT_EQ(block_soft_threshold(x, 5.0), Vector::Zero(2));
  EXPECT_EQ(block_soft_threshold(Vector::Zero(3), 0.0), Vector::Zero(3));
}

TEST(BlockSoftThreshold, MatchesRayMinimizationOracle) {
  Vector x(2);
  x << 3.0, 4.0;
  const Vector oracle = block_soft_threshold_oracle(x, 1.0);
  EXPECT_NEAR(oracle[0], 2.4, 1e-4);
  EXPECT_NEAR(oracle[1], 3.2, 1e-4);
  const Vector result = block_soft_threshold(x, 1.0);
  EXPECT_DOUBLE_EQ(result[0], 2.4);
  EXPECT_DOUBLE_EQ(result[1], 3.2);
}

TEST(BlockSoftThreshold, ZeroThresholdIsIdentity) {
  Vector x(3);
  x << -2.0, 0.0, 0.0;
  EXPECT_EQ(block_soft_threshold(x, 0.0), x);
}

TEST(Thresholding, Nonexpansive) {
  Rng rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    const double x = 10.0 * (rng.uniform() - 0.5);
    const double lambda = 3.0 * rng.uniform();
    EXPECT_LE(std::abs(soft_threshold(x, lambda)), std::abs(x));
    Vector v(4);
    for (int i = 0; i < 4; ++i) v[i] = 5.0 * (rng.uniform() - 0.5);
    EXPECT_LE(block_soft_threshold(v, lambda).norm(), v.norm() + 1e-15);
  }
}

TEST(Thresholding, BstOnScalarReducesToSt) {
  Rng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const double x = 6.0 * (rng.uniform() - 0.5);
    const double lambda = 2.0 * rng.uniform();
    Vector v(1);
    v << x;
    EXPECT_DOUBLE_EQ(block_soft_threshold(v, lambda)[0], soft_threshold(x, lambda));
  }
}

TEST(SubspaceDistance, KnownValues) {
  Vector e1 = Vector::Unit(3, 0), e2 = Vector::Unit(3, 1);
  EXPECT_DOUBLE_EQ(subspace_distance(e1, e1), 0.0);
  EXPECT_DOUBLE_EQ(subspace_distance(e1, e2), 2.0);
}

TEST(SubspaceDistance, MatchesExplicitProjectorDifference) {
  Vector diag(2), e1(2);
  diag << 1.0, 1.0;
  diag /= std::sqrt(2.0);
  e1 << 1.0, 0.0;
  // direct Frobenius computation on the 2x2 projectors
  const Matrix p1 = diag * diag.transpose();
  const Matrix p2 = e1 * e1.transpose();
  const double oracle = (p1 - p2).squaredNorm();
  EXPECT_NEAR(oracle, 1.0, 1e-12);
  EXPECT_NEAR(subspace_distance(diag, e1), 1.0, 1e-12);
}

TEST(SubspaceDistance, SignAndScaleInvariant) {
  Rng rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector v = sgpca::testing::random_unit(8, rng.next_u64());
    const Vector w = sgpca::testing::random_unit(8, rng.next_u64());
    EXPECT_NEAR(subspace_distance(v, -v), 0.0, 1e-14);
    EXPECT_NEAR(subspace_distance(2.5 * v, -0.3 * v), 0.0, 1e-12);
    // for unit vectors the distance is exactly 2(1 - (v'w)^2)
    const double cos = v.dot(w);
    EXPECT_NEAR(subspace_distance(v, w), 2.0 * (1.0 - cos * cos), 1e-12);
    EXPECT_NEAR(subspace_distance(v, w), subspace_distance(w, v), 1e-15);
  }
}

TEST(SubspaceDistance, RejectsZeroVector) {
  Vector v = Vector::Unit(3, 0);
  EXPECT_THROW(
      {
        try {
          subspace_distance(v, Vector::Zero(3));
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::DegenerateVector);
          throw;
        }
      },
      Error);
}

TEST(CanonicalizeSign, LargestMagnitudePositiveTiesLowestIndex) {
  Vector v(3);
  v << -0.5, 0.5, -0.1;  // tie between |v0| and |v1|: index 0 wins
  canonicalize_sign(v);
  EXPECT_GT(v[0], 0.0);
  v << 0.1, -0.9, 0.2;
  canonicalize_sign(v);
  EXPECT_GT(v[1], 0.0);
}
