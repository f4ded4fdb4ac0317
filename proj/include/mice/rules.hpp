#pragma once

// Pure numeric rules of the estimator: error model, sample allocation, and
// the drop/restart tests. Everything here is a function of plain numbers so
// the hierarchy code and the tests share one implementation.

#include "mice/common.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace mice {

// What the allocation needs to know about one hierarchy layer.
struct LayerLoad {
  double variance = 0.0;     // V, total component variance
  double cost_weight = 1.0;  // gradient evaluations per sample (1 base, 2 difference)
  std::size_t samples = 0;   // current M
  bool frozen = false;       // frozen layers take no samples and carry no variance
};

struct SampleBounds {
  std::size_t m_min = 1;
  std::size_t max_samples = 10'000'000;
};

struct StatError {
  double value = 0.0;
  bool warmup = false;  // some non-frozen layer had fewer than two samples
};

// Sum over layers of V/M, times (N - M)/(N - 1) for a finite population.
StatError stat_error_sq(std::span<const LayerLoad> layers, const Population& pop);

// Lagrangian-relaxation sample sizes for the tolerance tol_sq = eps^2 |g|^2.
// Targets never go below the current M, are clamped to [m_min, max_samples]
// and, for finite populations, to N; layers reaching N are removed from the
// budget and the rest re-solved. Frozen layers get target 0.
std::vector<std::size_t> optimal_sample_sizes(std::span<const LayerLoad> layers, double tol_sq,
                                              const SampleBounds& bounds, const Population& pop);

// Weighted new samples plus the aggregation term, in gradient evaluations.
// `baseline` is the per-layer sample count already paid for.
double incremental_work(std::span<const LayerLoad> layers, std::span<const std::size_t> baseline,
                        std::span<const std::size_t> targets, double cost_aggr);

// Drop iteration k-1 when v_bar / (sqrt(v_prev) + sqrt(v_curr))^2 <= 1 + delta.
// Both variances zero means perfect coupling: drop.
bool should_drop(double v_bar, double v_prev, double v_curr, double delta_drop);

// ceil(v_raw / tol_sq) gradient evaluations, floored at m_min_restart.
double restart_cost(double v_raw, double tol_sq, std::size_t m_min_restart);

bool should_restart(double rest_cost, double incremental_work, double delta_rest);

// Number of jackknife estimates and the 1-based rank of the reported norm.
std::size_t resample_count(double delta_re, double budget_hint, double cost_ratio_samp,
                           std::size_t n_layers, std::size_t min_resample,
                           std::size_t max_resample);
std::size_t percentile_rank(std::size_t n_samp, double p_re);

}  // namespace mice
