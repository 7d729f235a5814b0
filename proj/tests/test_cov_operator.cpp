#include <gtest/gtest.h>

#include "sgpca/cov_operator.hpp"
#include "sgpca/rng.hpp"
#include "support/test_helpers.hpp"

using namespace sgpca;
namespace th = sgpca::testing;

TEST(CovOperator, IdentityDataHalvesBasisVector) {
  // X = 2x2 identity, n = 2: (1/n) X'X = I/2 (centering off to match)
  DataMatrix data(Matrix::Identity(2, 2));
  const CovOperator op = CovOperator::from_data(data, /*center=*/false);
  Vector u(2);
  u << 1.0, 0.0;
  const Vector result = cov_apply(op, u);
  EXPECT_DOUBLE_EQ(result[0], 0.5);
  EXPECT_DOUBLE_EQ(result[1], 0.0);
}

TEST(CovOperator, ImplicitMatchesExplicitOracle) {
  Rng rng(301);
  const Matrix x = th::random_gaussian(10, 6, rng.next_u64());
  DataMatrix data(x);
  const CovOperator implicit_op = CovOperator::from_data(data, /*center=*/false);
  const Matrix sigma = x.transpose() * x / 10.0;  // explicit oracle
  const CovOperator explicit_op = CovOperator::from_matrix(sigma);
  for (int trial = 0; trial < 10; ++trial) {
    Vector u(6);
    for (int i = 0; i < 6; ++i) u[i] = rng.normal();
    const Vector a = implicit_op.apply(u);
    const Vector b = explicit_op.apply(u);
    const Vector direct = sigma * u;
    EXPECT_LE((a - direct).norm(), 1e-10 * direct.norm());
    EXPECT_LE((b - direct).norm(), 1e-14 * direct.norm());
  }
}

TEST(CovOperator, DeflationRemovesEigenvectorComponent) {
  const Matrix sigma = th::random_psd(8, 99, 3.0, 1.0);
  const Vector v = th::dense_leading_eigenvector(sigma);
  CovOperator op = CovOperator::from_matrix(sigma);
  op.deflate(v);
  // (S - rho vv')v with rho = v'Sv kills the component along v
  const Vector oracle = (sigma - v.dot(sigma * v) * v * v.transpose()) * v;
  const Vector result = op.apply(v);
  EXPECT_LE((result - oracle).norm(), 1e-12);
  EXPECT_LE(result.norm(), 1e-10);
}

TEST(CovOperator, ImplicitExplicitAgreementUnderDeflations) {
  // 200 random instances, up to 3 deflations each
  Rng rng(302);
  for (int instance = 0; instance < 200; ++instance) {
    const int n = 3 + static_cast<int>(rng.uniform_int(48));
    const int p = 2 + static_cast<int>(rng.uniform_int(99));
    const Matrix x = th::random_gaussian(n, p, rng.next_u64());
    DataMatrix data(x);
    CovOperator implicit_op = CovOperator::from_data(data, /*center=*/true);
    const Matrix xc = centered_columns(x);
    CovOperator explicit_op = CovOperator::from_matrix(xc.transpose() * xc / n);
    const int deflations = static_cast<int>(rng.uniform_int(4));
    for (int d = 0; d < deflations; ++d) {
      const Vector direction = th::random_unit(p, rng.next_u64());
      implicit_op.deflate(direction);
      explicit_op.deflate(direction);
    }
    const Vector u = th::random_unit(p, rng.next_u64());
    const Vector a = implicit_op.apply(u);
    const Vector b = explicit_op.apply(u);
    const double scale = std::max(a.norm(), b.norm());
    ASSERT_GT(scale, 0.0);
    EXPECT_LE((a - b).norm() / scale, 1e-10);
  }
}

TEST(CovOperator, DataModeDeflationProjectsBothSides) {
  const Matrix sigma0 = th::random_psd(6, 55, 2.0, 1.0);
  const Vector v = th::random_unit(6, 56);
  CovOperator op = CovOperator::from_matrix(sigma0, CovOperator::DeflationMode::Data);
  op.deflate(v);
  const Matrix projector = Matrix::Identity(6, 6) - v * v.transpose();
  const Matrix oracle = projector * sigma0 * projector;
  EXPECT_LE((op.dense() - oracle).norm(), 1e-12);

  // implicit data-mode deflation agrees with the explicit projection
  const Matrix x = th::random_gaussian(12, 6, 57);
  DataMatrix data(x);
  CovOperator implicit_op =
      CovOperator::from_data(data, /*center=*/false, CovOperator::DeflationMode::Data);
  implicit_op.deflate(v);
  const Matrix xs = x - (x * v) * v.transpose();
  const Matrix implicit_oracle = xs.transpose() * xs / 12.0;
  const Vector u = th::random_unit(6, 58);
  EXPECT_LE((implicit_op.apply(u) - implicit_oracle * u).norm(), 1e-12);
}

TEST(CovOperator, DiagonalMatchesDense) {
  const Matrix x = th::random_gaussian(9, 7, 60);
  DataMatrix data(x);
  CovOperator op = CovOperator::from_data(data, /*center=*/true);
  op.deflate(th::random_unit(7, 61));
  EXPECT_LE((op.diagonal() - op.dense().diagonal()).norm(), 1e-12);
}

TEST(CovOperator, DimensionMismatchRejected) {
  DataMatrix data(Matrix::Identity(3, 3));
  const CovOperator op = CovOperator::from_data(data, false);
  EXPECT_THROW(op.apply(Vector::Zero(4)), Error);
}

TEST(CovOperator, RejectsSingleSample) {
  DataMatrix data(Matrix::Ones(1, 3));
  EXPECT_THROW(CovOperator::from_data(data), Error);
}
