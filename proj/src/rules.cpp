#include "mice/rules.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>

namespace mice {

namespace {

// ceil that ignores rounding noise of a few ulps above an integer.
std::size_t ceil_count(double x, std::size_t cap) {
  if (!(x > 0.0)) return 0;
  if (!std::isfinite(x) || x >= static_cast<double>(cap)) return cap;
  return static_cast<std::size_t>(std::ceil(x * (1.0 - 4.0 * DBL_EPSILON)));
}

}  // namespace

StatError stat_error_sq(std::span<const LayerLoad> layers, const Population& pop) {
  StatError err;
  for (const auto& layer : layers) {
    if (layer.frozen) continue;
    if (layer.samples < 2) err.warmup = true;
    if (layer.samples == 0) continue;
    const double m = static_cast<double>(layer.samples);
    double term = layer.variance / m;
    if (pop.is_finite()) {
      const double n = static_cast<double>(*pop.size);
      term *= *pop.size > 1 ? std::max(0.0, (n - m) / (n - 1.0)) : 0.0;
    }
    err.value += term;
  }
  return err;
}

std::vector<std::size_t> optimal_sample_sizes(std::span<const LayerLoad> layers, double tol_sq,
                                              const SampleBounds& bounds, const Population& pop) {
  std::size_t cap = bounds.max_samples;
  if (pop.is_finite()) cap = std::min(cap, *pop.size);

  // Layers saturating a finite population carry no error; the others are
  // re-solved without them until no new layer saturates.
  std::vector<bool> saturated(layers.size(), false);
  std::vector<std::size_t> targets(layers.size(), 0);
  for (bool again = true; again;) {
    again = false;
    double weighted_sum = 0.0;
    double variance_sum = 0.0;
    for (std::size_t i = 0; i < layers.size(); ++i) {
      if (layers[i].frozen || saturated[i]) continue;
      weighted_sum += std::sqrt(layers[i].variance * layers[i].cost_weight);
      variance_sum += layers[i].variance;
    }
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const auto& layer = layers[i];
      if (layer.frozen || saturated[i]) continue;
      const double numerator = weighted_sum * std::sqrt(layer.variance / layer.cost_weight);
      double ideal = 0.0;
      if (numerator > 0.0) {
        if (pop.is_finite()) {
          const double n = static_cast<double>(*pop.size);
          if (*pop.size <= 1) {
            ideal = n;
          } else {
            const double denom = tol_sq + variance_sum / (n - 1.0);
            ideal = denom > 0.0 ? n / (n - 1.0) * numerator / denom
                                : std::numeric_limits<double>::infinity();
          }
        } else {
          ideal = tol_sq > 0.0 ? numerator / tol_sq : std::numeric_limits<double>::infinity();
        }
      }
      std::size_t m = ceil_count(ideal, cap);
      m = std::max(m, bounds.m_min);
      m = std::min(m, cap);
      m = std::max(m, layer.samples);
      targets[i] = m;
      if (pop.is_finite() && m >= *pop.size && layer.variance > 0.0) {
        saturated[i] = true;
        again = true;
      }
    }
  }
  return targets;
}

double incremental_work(std::span<const LayerLoad> layers, std::span<const std::size_t> baseline,
                        std::span<const std::size_t> targets, double cost_aggr) {
  require_same_dim(static_cast<Eigen::Index>(layers.size()),
                   static_cast<Eigen::Index>(targets.size()), "incremental_work");
  require_same_dim(static_cast<Eigen::Index>(layers.size()),
                   static_cast<Eigen::Index>(baseline.size()), "incremental_work");
  double work = 0.0;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (targets[i] > baseline[i]) {
      work += layers[i].cost_weight * static_cast<double>(targets[i] - baseline[i]);
    }
  }
  return work + static_cast<double>(layers.size()) * cost_aggr;
}

bool should_drop(double v_bar, double v_prev, double v_curr, double delta_drop) {
  const double pooled = std::sqrt(v_prev) + std::sqrt(v_curr);
  if (pooled == 0.0) return true;
  return v_bar / (pooled * pooled) <= 1.0 + delta_drop;
}

double restart_cost(double v_raw, double tol_sq, std::size_t m_min_restart) {
  double samples = 0.0;
  if (v_raw > 0.0) {
    samples = tol_sq > 0.0 ? std::ceil(v_raw / tol_sq * (1.0 - 4.0 * DBL_EPSILON))
                           : std::numeric_limits<double>::infinity();
  }
  return std::max(samples, static_cast<double>(m_min_restart));
}

bool should_restart(double rest_cost, double incremental_work, double delta_rest) {
  if (!(incremental_work > 0.0)) return false;
  return rest_cost / incremental_work <= 1.0 + delta_rest;
}

std::size_t resample_count(double delta_re, double budget_hint, double cost_ratio_samp,
                           std::size_t n_layers, std::size_t min_resample,
                           std::size_t max_resample) {
  std::size_t n = min_resample;
  if (n_layers > 0 && budget_hint > 0.0) {
    const double raw =
        std::floor(delta_re * budget_hint / (cost_ratio_samp * static_cast<double>(n_layers)));
    if (raw >= static_cast<double>(max_resample)) return std::max(max_resample, min_resample);
    n = std::max(n, static_cast<std::size_t>(raw));
  }
  return std::min(n, std::max(max_resample, min_resample));
}

std::size_t percentile_rank(std::size_t n_samp, double p_re) {
  const auto rank =
      static_cast<std::size_t>(std::floor(static_cast<double>(n_samp) * p_re / 100.0));
  return std::clamp<std::size_t>(rank, 1, std::max<std::size_t>(n_samp, 1));
}

}  // namespace mice
