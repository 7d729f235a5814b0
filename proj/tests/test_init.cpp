#include <gtest/gtest.h>

#include <cmath>

#include "sgpca/init.hpp"
#include "sgpca/simgen.hpp"
#include "support/test_helpers.hpp"

using namespace sgpca;
namespace th = sgpca::testing;

TEST(DiagonalThresholdInit, PicksPlantedHighVarianceColumn) {
  // one column scaled 10x over the noise
  Rng rng(100);
  Matrix x = th::random_gaussian(50, 12, rng.next_u64());
  x.col(4) *= 10.0;
  const DataMatrix data(x);
  const GroupPartition partition = GroupPartition::equal_blocks(4, 3);
  InitConfig config;
  config.pi_const = 1.0;
  config.omega_const = 1.0;
  const InitResult result = diagonal_threshold_init(data, partition, config);
  EXPECT_FALSE(result.used_fallback);
  ASSERT_FALSE(result.selected_columns.empty());
  // verify selection by direct variance computation
  const Vector moments =
      centered_columns(x).colwise().squaredNorm().transpose() / 50.0;
  int top = 0;
  for (int c = 1; c < 12; ++c)
    if (moments[c] > moments[top]) top = c;
  EXPECT_EQ(top, 4);
  EXPECT_TRUE(std::count(result.selected_columns.begin(), result.selected_columns.end(), 4));
  int arg = 0;
  for (int c = 1; c < 12; ++c)
    if (std::abs(result.loading[c]) > std::abs(result.loading[arg])) arg = c;
  EXPECT_EQ(arg, 4);
}

TEST(DiagonalThresholdInit, PureNoiseWithLargeConstantsFallsBack) {
  // Monte Carlo: with pi = omega = 10 the selection is empty essentially always
  int fallbacks = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const DataMatrix data(th::random_gaussian(100, 100, 200 + seed));
    const GroupPartition partition = GroupPartition::equal_blocks(20, 5);
    InitConfig config;
    config.pi_const = 10.0;
    config.omega_const = 10.0;
    const InitResult result = diagonal_threshold_init(data, partition, config);
    if (result.used_fallback) ++fallbacks;
    EXPECT_NEAR(result.loading.norm(), 1.0, 1e-12);
  }
  EXPECT_GE(fallbacks, 99);
}

TEST(DiagonalThresholdInit, ExactUnitMomentsWithPositiveMarginFallBack) {
  // every column has sample second moment exactly 1 and pi_n, omega_n > 0
  Matrix x(4, 6);
  for (int c = 0; c < 6; ++c) {
    x(0, c) = 1.0;
    x(1, c) = 1.0;
    x(2, c) = -1.0;
    x(3, c) = -1.0;
  }
  const DataMatrix data(x);
  const GroupPartition partition = GroupPartition::equal_blocks(3, 2);
  const InitConfig config;  // pi = omega = 3 > 0
  const InitResult result = diagonal_threshold_init(data, partition, config);
  EXPECT_TRUE(result.used_fallback);
  EXPECT_EQ(result.selected_columns.size(), 1u);
  EXPECT_EQ(result.selected_columns[0], 0);  // ties break to the lowest index
}

TEST(DiagonalThresholdInit, SupportedOnlyOnSelection) {
  const auto [spec, n] = setting_preset("2ii", 77);
  const DataMatrix data = gen_data(spec, n, 78);
  InitConfig config;
  config.pi_const = 1.0;
  config.omega_const = 0.3;
  const InitResult result = diagonal_threshold_init(data, spec.partition, config);
  EXPECT_NEAR(result.loading.norm(), 1.0, 1e-12);
  std::vector<bool> selected(static_cast<std::size_t>(data.p()), false);
  for (int c : result.selected_columns) selected[static_cast<std::size_t>(c)] = true;
  for (int c = 0; c < data.p(); ++c)
    if (!selected[static_cast<std::size_t>(c)]) EXPECT_EQ(result.loading[c], 0.0);
}

TEST(DiagonalThresholdInit, MonotoneInConstants) {
  const auto [spec, n] = setting_preset("1c", 88);
  const DataMatrix data = gen_data(spec, n, 89);
  std::size_t previous_groups = spec.partition.num_groups() + 1;
  std::size_t previous_columns = data.p() + 1;
  for (double constant : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    InitConfig config;
    config.pi_const = constant;
    config.omega_const = constant;
    const InitResult result = diagonal_threshold_init(data, spec.partition, config);
    if (result.used_fallback) break;
    EXPECT_LE(result.selected_groups.size(), previous_groups);
    EXPECT_LE(result.selected_columns.size(), previous_columns);
    previous_groups = result.selected_groups.size();
    previous_columns = result.selected_columns.size();
  }
}

TEST(DiagonalThresholdInit, VacuousSelectionReducesToDensePca) {
  // constants tiny enough that every column passes: output must equal the
  // dense leading eigenvector of the sample covariance
  Rng rng(321);
  Matrix x = th::random_gaussian(30, 8, rng.next_u64());
  x.col(0) *= 3.0;  // make every second moment comfortably above 1
  x *= 2.0;
  const DataMatrix data(x);
  const GroupPartition partition = GroupPartition::equal_blocks(4, 2);
  InitConfig config;
  config.pi_const = 1e-9;
  config.omega_const = 1e-9;
  const InitResult result = diagonal_threshold_init(data, partition, config);
  ASSERT_EQ(result.selected_columns.size(), 8u);
  const Matrix xc = centered_columns(x);
  const Vector oracle = th::dense_leading_eigenvector(xc.transpose() * xc / 30.0);
  EXPECT_LE(subspace_distance(result.loading, oracle), 1e-10);
}

TEST(DiagonalThresholdInit, SingletonGroupsUseSameStatisticTwice) {
  // T = 1, G = p: group selection and entry selection see the same columns
  Rng rng(654);
  Matrix x = th::random_gaussian(40, 10, rng.next_u64());
  x.col(2) *= 4.0;
  x.col(7) *= 3.0;
  const DataMatrix data(x);
  const GroupPartition partition = GroupPartition::equal_blocks(10, 1);
  InitConfig config;
  config.pi_const = 2.0;
  config.omega_const = 1e-12;  // entry rule weaker than group rule here
  const InitResult result = diagonal_threshold_init(data, partition, config);
  EXPECT_FALSE(result.used_fallback);
  ASSERT_EQ(result.selected_groups.size(), result.selected_columns.size());
  for (std::size_t i = 0; i < result.selected_groups.size(); ++i)
    EXPECT_EQ(partition.group(result.selected_groups[i])[0], result.selected_columns[i]);
}
