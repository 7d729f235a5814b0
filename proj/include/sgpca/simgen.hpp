#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sgpca/error.hpp"
#include "sgpca/operators.hpp"
#include "sgpca/rng.hpp"
#include "sgpca/types.hpp"

namespace sgpca {

struct Spike {
  double lambda_sq = 0.0;  // signal strength lambda_j^2
  Vector loading;          // unit norm
};

// Ground truth for the spiked covariance Sigma = sum lambda_j^2 v_j v_j' +
// sigma^2 I. Spikes are strictly decreasing in strength and loadings
// mutually orthonormal.
struct SpikedModelSpec {
  std::vector<Spike> spikes;
  double sigma_sq = 1.0;
  GroupPartition partition;

  SpikedModelSpec(std::vector<Spike> spikes_in, double sigma_sq_in, GroupPartition partition_in)
      : spikes(std::move(spikes_in)), sigma_sq(sigma_sq_in), partition(std::move(partition_in)) {
    if (!(sigma_sq > 0.0)) fail(ErrorCode::DegenerateSpec, "SpikedModelSpec: sigma_sq must be > 0");
    for (std::size_t j = 0; j < spikes.size(); ++j) {
      const auto& spike = spikes[j];
      if (!(spike.lambda_sq > 0.0))
        fail(ErrorCode::DegenerateSpec, "SpikedModelSpec: spike strengths must be > 0");
      if (spike.loading.size() != partition.dim())
        fail(ErrorCode::DegenerateSpec, "SpikedModelSpec: loading dimension mismatch");
      if (std::abs(spike.loading.norm() - 1.0) > 1e-10)
        fail(ErrorCode::DegenerateSpec, "SpikedModelSpec: loading not unit norm");
      if (j > 0 && !(spikes[j - 1].lambda_sq > spike.lambda_sq))
        fail(ErrorCode::DegenerateSpec, "SpikedModelSpec: spikes must strictly decrease");
      for (std::size_t i = 0; i < j; ++i)
        if (std::abs(spikes[i].loading.dot(spike.loading)) > 1e-10)
          fail(ErrorCode::DegenerateSpec, "SpikedModelSpec: loadings not orthogonal");
    }
  }

  int dim() const { return partition.dim(); }
  int num_spikes() const { return static_cast<int>(spikes.size()); }
};

// Sparse ground-truth loading: the ceil(active_group_frac * G) groups
// starting at first_group are active, the first ceil(within_active_frac *
// p_g) coordinates of each receive i.i.d. Rademacher signs, and the vector
// is normalized with canonical sign. Active positions are deterministic;
// only the signs depend on the seed.
inline Vector gen_loading(const GroupPartition& partition, double active_group_frac,
                          double within_active_frac, std::uint64_t seed, int first_group = 0) {
  if (!(active_group_frac > 0.0) || active_group_frac > 1.0 || !(within_active_frac > 0.0) ||
      within_active_frac > 1.0)
    fail(ErrorCode::DegenerateSpec, "gen_loading: fractions must be in (0, 1]");
  const int num_active =
      static_cast<int>(std::ceil(active_group_frac * partition.num_groups()));
  if (first_group < 0 || first_group + num_active > partition.num_groups())
    fail(ErrorCode::DegenerateSpec, "gen_loading: active block exceeds the partition");

  Rng rng = Rng(seed).derive(0x10ad);
  Vector v = Vector::Zero(partition.dim());
  int placed = 0;
  for (int g = first_group; g < first_group + num_active; ++g) {
    const auto& columns = partition.group(g);
    const int within =
        static_cast<int>(std::ceil(within_active_frac * static_cast<double>(columns.size())));
    for (int t = 0; t < within; ++t) {
      v[columns[static_cast<std::size_t>(t)]] = rng.rademacher();
      ++placed;
    }
  }
  if (placed == 0) fail(ErrorCode::DegenerateSpec, "gen_loading: empty support");
  v /= v.norm();
  canonicalize_sign(v);
  return v;
}

// Draws n samples x_i = sum_j lambda_j q_ij v_j + eps_i with standard normal
// scores and N(0, sigma^2 I) noise. Bit-identical for identical seeds.
inline DataMatrix gen_data(const SpikedModelSpec& spec, int n, std::uint64_t seed) {
  if (n < 2) fail(ErrorCode::DomainError, "gen_data: need n >= 2");
  const int p = spec.dim();
  const int J = spec.num_spikes();

  Rng score_stream = Rng(seed).derive(1);
  Rng noise_stream = Rng(seed).derive(2);

  Matrix x(n, p);
  const double noise_sd = std::sqrt(spec.sigma_sq);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < p; ++c) x(i, c) = noise_sd * noise_stream.normal();
  for (int j = 0; j < J; ++j) {
    const double lambda = std::sqrt(spec.spikes[static_cast<std::size_t>(j)].lambda_sq);
    const Vector& v = spec.spikes[static_cast<std::size_t>(j)].loading;
    Rng stream = score_stream.derive(static_cast<std::uint64_t>(j));
    for (int i = 0; i < n; ++i) x.row(i) += lambda * stream.normal() * v.transpose();
  }
  return DataMatrix(std::move(x));
}

// The simulation settings, all with n = 100 samples:
//   1a/1b/1c : G=300 groups of size T=3/5/10, lambda^2=5, 1% of groups
//              active, 80% of coordinates within an active group nonzero
//   2i       : G=300, T=10, lambda^2=5, group-only sparsity (all coordinates
//              of active groups nonzero)
//   2ii      : same as 2i with 80% of coordinates nonzero
//   3        : three spikes 20/10/5 with non-overlapping supports, each
//              patterned like 2ii
inline std::pair<SpikedModelSpec, int> setting_preset(std::string_view which, std::uint64_t seed) {
  const int samples = 100;
  const double lambda_sq = 5.0;
  auto single = [&](int group_size, double within_frac) {
    GroupPartition partition = GroupPartition::equal_blocks(300, group_size);
    Vector v = gen_loading(partition, 0.01, within_frac, Rng(seed).derive(11).key());
    std::vector<Spike> spikes{{lambda_sq, std::move(v)}};
    return SpikedModelSpec(std::move(spikes), 1.0, std::move(partition));
  };
  if (which == "1a") return {single(3, 0.8), samples};
  if (which == "1b") return {single(5, 0.8), samples};
  if (which == "1c") return {single(10, 0.8), samples};
  if (which == "2i") return {single(10, 1.0), samples};
  if (which == "2ii") return {single(10, 0.8), samples};
  if (which == "3") {
    GroupPartition partition = GroupPartition::equal_blocks(300, 10);
    const double strengths[3] = {20.0, 10.0, 5.0};
    std::vector<Spike> spikes;
    for (int j = 0; j < 3; ++j) {
      Vector v = gen_loading(partition, 0.01, 0.8, Rng(seed).derive(11).derive(j).key(),
                             /*first_group=*/3 * j);
      spikes.push_back({strengths[j], std::move(v)});
    }
    return {SpikedModelSpec(std::move(spikes), 1.0, std::move(partition)), samples};
  }
  fail(ErrorCode::UsageError, "setting_preset: unknown tag '" + std::string(which) +
                                  "', expected 1a|1b|1c|2i|2ii|3");
}

// Per-component alignment and subspace distance plus coordinate-level
// signal-detection errors, pooled over components and also per component.
struct EvalResult {
  std::vector<double> alignment;  // |v_hat' v| per component
  std::vector<double> distance;   // subspace distance per component
  std::vector<double> type1_per;
  std::vector<double> type2_per;
  double type1 = 0.0;  // pooled false positive rate over true-zero coordinates
  double type2 = 0.0;  // pooled miss rate over true-nonzero coordinates
};

inline EvalResult evaluate(const std::vector<PCEstimate>& estimates,
                           const SpikedModelSpec& spec) {
  if (static_cast<int>(estimates.size()) > spec.num_spikes())
    fail(ErrorCode::DimensionMismatch, "evaluate: more estimates than spikes");
  EvalResult result;
  double false_positives = 0.0, true_zeros = 0.0, misses = 0.0, true_nonzeros = 0.0;
  for (std::size_t j = 0; j < estimates.size(); ++j) {
    const Vector& truth = spec.spikes[j].loading;
    const Vector& loading = estimates[j].loading;
    if (loading.size() != truth.size())
      fail(ErrorCode::DimensionMismatch, "evaluate: loading dimension mismatch");
    result.alignment.push_back(std::abs(loading.dot(truth)));
    result.distance.push_back(subspace_distance(loading, truth));
    double fp = 0.0, tz = 0.0, miss = 0.0, tn = 0.0;
    for (int c = 0; c < truth.size(); ++c) {
      const bool selected = loading[c] != 0.0;
      if (truth[c] == 0.0) {
        tz += 1.0;
        if (selected) fp += 1.0;
      } else {
        tn += 1.0;
        if (!selected) miss += 1.0;
      }
    }
    result.type1_per.push_back(tz > 0.0 ? fp / tz : 0.0);
    result.type2_per.push_back(tn > 0.0 ? miss / tn : 0.0);
    false_positives += fp;
    true_zeros += tz;
    misses += miss;
    true_nonzeros += tn;
  }
  result.type1 = true_zeros > 0.0 ? false_positives / true_zeros : 0.0;
  result.type2 = true_nonzeros > 0.0 ? misses / true_nonzeros : 0.0;
  return result;
}

}  // namespace sgpca
