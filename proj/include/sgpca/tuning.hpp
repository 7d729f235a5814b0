#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sgpca/cov_operator.hpp"
#include "sgpca/error.hpp"
#include "sgpca/init.hpp"
#include "sgpca/parallel.hpp"
#include "sgpca/rng.hpp"
#include "sgpca/solver.hpp"
#include "sgpca/types.hpp"

namespace sgpca {

struct TuningGrid {
  std::vector<double> etas;  // candidate set H
  std::vector<double> taus;  // candidate set T
  double rho = 0.5;          // resample proportion
  int num_resamples = 20;    // B
  std::uint64_t seed = 0;

  void validate() const {
    if (etas.empty() || taus.empty())
      fail(ErrorCode::DomainError, "TuningGrid: candidate sets must be nonempty");
    for (double e : etas)
      if (!(e >= 0.0)) fail(ErrorCode::DomainError, "TuningGrid: eta candidates must be >= 0");
    for (double t : taus)
      if (!(t >= 0.0)) fail(ErrorCode::DomainError, "TuningGrid: tau candidates must be >= 0");
    if (!(rho > 0.0) || !(rho < 1.0))
      fail(ErrorCode::DomainError, "TuningGrid: rho must be in (0, 1)");
    if (num_resamples < 2) fail(ErrorCode::DomainError, "TuningGrid: B must be >= 2");
  }
};

struct AlignmentCell {
  double eta = 0.0;
  double tau = 0.0;
  double align = 0.0;         // in [0, 1]
  double mean_support = 0.0;  // over successful resamples
  int failures = 0;           // threshold-too-large resamples
};

struct AlignmentReport {
  int component = 0;                 // 1-based j
  std::vector<AlignmentCell> cells;  // |H| x |T| rows, eta-major
  int selected = -1;                 // index of the selected cell
  double rescale = 1.0;              // sqrt(floor(n rho)/n) applied at refit
};

// Deterministic row subset of size floor(n * rho); rows keep original order.
inline DataMatrix subsample(const DataMatrix& data, double rho, std::uint64_t seed) {
  if (!(rho > 0.0) || !(rho < 1.0))
    fail(ErrorCode::DomainError, "subsample: rho must be in (0, 1)");
  const int keep = static_cast<int>(std::floor(rho * data.n()));
  if (keep < 2)
    fail(ErrorCode::SubsampleTooSmall,
         "subsample: floor(n*rho) = " + std::to_string(keep) + " rows, need at least 2");
  Rng rng(seed);
  const std::vector<int> rows = rng.sample_without_replacement(data.n(), keep);
  Matrix values(keep, data.p());
  for (std::size_t i = 0; i < rows.size(); ++i)
    values.row(static_cast<int>(i)) = data.values().row(rows[i]);
  return DataMatrix(std::move(values), data.column_names());
}

// Mean absolute pairwise inner product over all unordered pairs; the
// absolute value removes the sign ambiguity of eigenvectors. Fewer than two
// usable estimates score 0.
inline double alignment_score(const std::vector<Vector>& estimates) {
  const std::size_t count = estimates.size();
  if (count < 2) return 0.0;
  double total = 0.0;
  for (std::size_t a = 0; a + 1 < count; ++a)
    for (std::size_t b = a + 1; b < count; ++b)
      total += std::abs(estimates[a].dot(estimates[b]));
  return total * 2.0 / (static_cast<double>(count) * static_cast<double>(count - 1));
}

struct TuneComponentResult {
  double eta = 0.0;  // selected, before rescaling
  double tau = 0.0;
  AlignmentReport report;
};

namespace detail {

struct ResampleOutcome {
  std::vector<std::optional<Vector>> cell_loadings;  // one slot per grid cell
  std::vector<int> cell_support;
};

}  // namespace detail

// Resampling sweep for one component (1-based component_index). For each of
// B subsamples a covariance operator is built, deflated with the previously
// estimated loadings, and one component is fit per (eta, tau) cell from a
// fresh diagonal-thresholding init on the subsample. Subsamples are shared
// across the grid cells of a component; per-task seeds depend only on
// (master seed, j, b), never on grid iteration order. Cells whose fit dies
// with threshold-too-large contribute no pairs.
inline TuneComponentResult tune_component(const DataMatrix& data,
                                          const GroupPartition& partition,
                                          const std::vector<Vector>& prior_loadings,
                                          int component_index, const TuningGrid& grid,
                                          const SolverConfig& config,
                                          const InitConfig& init_config, bool center = true,
                                          CovOperator::DeflationMode deflation_mode =
                                              CovOperator::DeflationMode::Covariance) {
  grid.validate();
  config.validate();
  const int cell_count = static_cast<int>(grid.etas.size() * grid.taus.size());
  const int resamples = grid.num_resamples;

  std::vector<detail::ResampleOutcome> outcomes(static_cast<std::size_t>(resamples));
  parallel_for(resamples, [&](int b) {
    const std::uint64_t task_seed = Rng(grid.seed)
                                        .derive(static_cast<std::uint64_t>(component_index))
                                        .derive(static_cast<std::uint64_t>(b))
                                        .key();
    const DataMatrix slice = subsample(data, grid.rho, task_seed);
    CovOperator op = CovOperator::from_data(slice, center, deflation_mode);
    for (const Vector& prior : prior_loadings) op.deflate(prior);
    // subsample init in the same deflation context as the solve
    const InitResult init = diagonal_threshold_init(op, partition, init_config, slice.n());

    auto& outcome = outcomes[static_cast<std::size_t>(b)];
    outcome.cell_loadings.resize(static_cast<std::size_t>(cell_count));
    outcome.cell_support.resize(static_cast<std::size_t>(cell_count), 0);
    int cell = 0;
    for (double eta : grid.etas) {
      for (double tau : grid.taus) {
        try {
          PCEstimate estimate =
              fit_component(op, partition, eta, tau, init.loading, config);
          outcome.cell_support[static_cast<std::size_t>(cell)] =
              static_cast<int>(estimate.support.size());
          outcome.cell_loadings[static_cast<std::size_t>(cell)] = std::move(estimate.loading);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::ThresholdTooLarge) throw;
        }
        ++cell;
      }
    }
  });

  TuneComponentResult result;
  result.report.component = component_index;
  result.report.cells.reserve(static_cast<std::size_t>(cell_count));
  int cell = 0;
  bool any_usable = false;
  for (double eta : grid.etas) {
    for (double tau : grid.taus) {
      AlignmentCell row;
      row.eta = eta;
      row.tau = tau;
      std::vector<Vector> loadings;
      double support_total = 0.0;
      for (int b = 0; b < resamples; ++b) {
        const auto& outcome = outcomes[static_cast<std::size_t>(b)];
        const auto& loading = outcome.cell_loadings[static_cast<std::size_t>(cell)];
        if (loading.has_value()) {
          loadings.push_back(*loading);
          support_total += outcome.cell_support[static_cast<std::size_t>(cell)];
        } else {
          ++row.failures;
        }
      }
      row.align = alignment_score(loadings);
      row.mean_support =
          loadings.empty() ? 0.0 : support_total / static_cast<double>(loadings.size());
      if (loadings.size() >= 2) any_usable = true;
      result.report.cells.push_back(row);
      ++cell;
    }
  }
  if (!any_usable)
    fail(ErrorCode::TuningFailed, "tune_component: component " +
                                      std::to_string(component_index) +
                                      ": no grid cell produced two usable estimates");

  // argmax alignment; ties prefer the sparser cell: larger eta, then larger tau
  int best = 0;
  for (int i = 1; i < cell_count; ++i) {
    const auto& candidate = result.report.cells[static_cast<std::size_t>(i)];
    const auto& incumbent = result.report.cells[static_cast<std::size_t>(best)];
    const bool better =
        candidate.align > incumbent.align ||
        (candidate.align == incumbent.align &&
         (candidate.eta > incumbent.eta ||
          (candidate.eta == incumbent.eta && candidate.tau > incumbent.tau)));
    if (better) best = i;
  }
  result.report.selected = best;
  result.eta = result.report.cells[static_cast<std::size_t>(best)].eta;
  result.tau = result.report.cells[static_cast<std::size_t>(best)].tau;
  return result;
}

struct TuneFitResult {
  std::vector<PCEstimate> estimates;
  std::vector<AlignmentReport> reports;
};

// Full resampling-based selection and estimation: per component, tune on
// subsamples, re-fit on the full data with the selected thresholds rescaled
// by sqrt(floor(n rho)/n) (applied to both levels, exactly once), then
// deflate and move to the next component. Initialization re-runs the
// diagonal-thresholding rule on the full data for each refit.
inline TuneFitResult tune_and_fit(const DataMatrix& data, const GroupPartition& partition,
                                  int num_components, const TuningGrid& grid,
                                  const SolverConfig& config, const InitConfig& init_config,
                                  bool center = true,
                                  CovOperator::DeflationMode deflation_mode =
                                      CovOperator::DeflationMode::Covariance) {
  if (num_components < 1) fail(ErrorCode::DomainError, "tune_and_fit: J must be >= 1");
  grid.validate();
  const double rescale =
      std::sqrt(std::floor(grid.rho * data.n()) / static_cast<double>(data.n()));

  TuneFitResult result;
  CovOperator full_op = CovOperator::from_data(data, center, deflation_mode);
  std::vector<Vector> priors;
  for (int j = 1; j <= num_components; ++j) {
    TuneComponentResult tuned = tune_component(data, partition, priors, j, grid, config,
                                               init_config, center, deflation_mode);
    tuned.report.rescale = rescale;
    const InitResult init = diagonal_threshold_init(full_op, partition, init_config, data.n());
    PCEstimate estimate;
    try {
      estimate = fit_component(full_op, partition, rescale * tuned.eta, rescale * tuned.tau,
                               init.loading, config);
    } catch (const Error& e) {
      fail(e.code(), "component " + std::to_string(j) + ": " + e.what());
    }
    full_op.deflate(estimate.loading);
    priors.push_back(estimate.loading);
    result.estimates.push_back(std::move(estimate));
    result.reports.push_back(std::move(tuned.report));
  }
  return result;
}

// Classifies each component's alignment-vs-mean-support curve. A curve is
// "peaked" when some interior point exceeds both endpoints by at least
// delta, the signature of a sparse component; dense noise components grow
// monotonically instead. Returns the count of leading peaked components.
inline int rank_heuristic(const std::vector<AlignmentReport>& reports, double delta = 0.05) {
  int rank = 0;
  for (const auto& report : reports) {
    const std::size_t count = report.cells.size();
    if (count < 3) break;
    std::vector<std::size_t> order(count);
    for (std::size_t i = 0; i < count; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&report](std::size_t a, std::size_t b) {
      const auto& lhs = report.cells[a];
      const auto& rhs = report.cells[b];
      if (lhs.mean_support != rhs.mean_support) return lhs.mean_support < rhs.mean_support;
      if (lhs.eta != rhs.eta) return lhs.eta < rhs.eta;
      return lhs.tau < rhs.tau;
    });
    double interior_max = -1.0;
    for (std::size_t i = 1; i + 1 < count; ++i)
      interior_max = std::max(interior_max, report.cells[order[i]].align);
    const double first = report.cells[order.front()].align;
    const double last = report.cells[order.back()].align;
    const bool peaked = interior_max >= first + delta && interior_max >= last + delta;
    if (!peaked) break;
    ++rank;
  }
  return rank;
}

}  // namespace sgpca
