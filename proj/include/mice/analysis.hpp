#pragma once

#include "mice/optimizers.hpp"
#include "mice/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mice {

// Per-iteration contraction factor of E|xi_k - xi*|^2 for SGD with the
// strongly convex step and relative gradient error eps.
double theory_rate(double kappa, double eps);

// Least-squares slope of log(y) against log(x). Needs at least min_points
// positive pairs; throws kInvalidArgument otherwise.
double fit_loglog_slope(std::span<const double> x, std::span<const double> y,
                        std::size_t min_points = 10);

// Slope of log(y) against k for equally spaced iterations.
double fit_log_rate(std::span<const double> y);

struct SamplingCost {
  std::uint64_t functional = 0;  // M_0 + 2 sum M_l over every layer ever built
  std::uint64_t counter = 0;     // instrumented gradient evaluations
};

// Rebuilds the sampling cost from per-layer telemetry. A layer is identified by
// (iteration, kind); when its sample count decreases it counts as a new layer.
SamplingCost total_sampling_cost(std::span<const RunRecord> records);

// Bootstrap percentiles of the mean of `values` (lo/hi in [0, 100]).
struct Band {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};
Band bootstrap_mean_band(std::span<const double> values, double lo_pct, double hi_pct,
                         std::size_t resamples, RngStream& rng);

// Linear-interpolated percentile of unsorted data, p in [0, 100].
double percentile(std::vector<double> values, double p);

}  // namespace mice
