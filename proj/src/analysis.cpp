#include "mice/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace mice {

double theory_rate(double kappa, double eps) {
  if (!(kappa >= 1.0) || !(eps >= 0.0)) {
    throw MiceError(ErrorCode::kInvalidArgument, "theory_rate: need kappa >= 1, eps >= 0");
  }
  const double c = (kappa - 1.0) / (kappa + 1.0);
  return (c * c + eps * eps) / (1.0 + eps * eps);
}

double fit_loglog_slope(std::span<const double> x, std::span<const double> y,
                        std::size_t min_points) {
  require_same_dim(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(y.size()),
                   "fit_loglog_slope");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(x[i]) || !std::isfinite(y[i])) continue;
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < std::max<std::size_t>(min_points, 2)) {
    throw MiceError(ErrorCode::kInvalidArgument,
                    "fit_loglog_slope: " + std::to_string(n) + " usable points");
  }
  const double dn = static_cast<double>(n);
  const double den = dn * sxx - sx * sx;
  if (!(std::abs(den) > 1e-300)) {
    throw MiceError(ErrorCode::kInvalidArgument, "fit_loglog_slope: degenerate window");
  }
  return (dn * sxy - sx * sy) / den;
}

double fit_log_rate(std::span<const double> y) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(y[i] > 0.0)) {
      throw MiceError(ErrorCode::kInvalidArgument, "fit_log_rate: nonpositive value");
    }
    const double x = static_cast<double>(i);
    const double ly = std::log(y[i]);
    sx += x;
    sy += ly;
    sxx += x * x;
    sxy += x * ly;
  }
  const double n = static_cast<double>(y.size());
  const double den = n * sxx - sx * sx;
  if (y.size() < 2 || den == 0.0) {
    throw MiceError(ErrorCode::kInvalidArgument, "fit_log_rate: need two points");
  }
  return (n * sxy - sx * sy) / den;
}

SamplingCost total_sampling_cost(std::span<const RunRecord> records) {
  SamplingCost cost;
  std::map<std::pair<std::size_t, int>, std::size_t> last;
  for (const auto& r : records) {
    cost.counter = std::max(cost.counter, r.grad_evals_cum);
    std::map<std::pair<std::size_t, int>, std::size_t> now;
    for (const auto& l : r.layers) {
      if (l.kind == LayerKind::kFrozenBase) continue;
      const auto key = std::make_pair(l.iter, static_cast<int>(l.kind));
      const std::uint64_t w = l.kind == LayerKind::kDifference ? 2 : 1;
      auto it = last.find(key);
      const std::size_t before = (it == last.end() || it->second > l.samples) ? 0 : it->second;
      cost.functional += w * (l.samples - before);
      now[key] = l.samples;
    }
    last = std::move(now);
  }
  return cost;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw MiceError(ErrorCode::kInvalidArgument, "percentile: empty input");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(p, 0.0, 100.0) / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

Band bootstrap_mean_band(std::span<const double> values, double lo_pct, double hi_pct,
                         std::size_t resamples, RngStream& rng) {
  if (values.empty() || resamples == 0) {
    throw MiceError(ErrorCode::kInvalidArgument, "bootstrap_mean_band: empty input");
  }
  Band b;
  for (double v : values) b.mean += v;
  b.mean /= static_cast<double>(values.size());
  std::vector<double> means(resamples);
  for (auto& m : means) {
    double s = 0.0;
    for (std::size_t j = 0; j < values.size(); ++j) s += values[rng.uniform_index(values.size())];
    m = s / static_cast<double>(values.size());
  }
  b.lo = percentile(means, lo_pct);
  b.hi = percentile(std::move(means), hi_pct);
  return b;
}

}  // namespace mice
