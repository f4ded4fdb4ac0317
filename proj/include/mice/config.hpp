#pragma once

#include <cstddef>
#include <string>

namespace mice {

enum class Clipping { kNone, kA, kB };

const char* to_string(Clipping c);
Clipping parse_clipping(const std::string& s);

// Tunables of the estimator. Defaults are the values used for every problem in
// the reference experiments; eps must be set per problem.
struct MiceConfig {
  double eps = 1.0;               // relative statistical tolerance
  double delta_drop = 0.5;        // favors dropping
  double delta_rest = 0.0;        // favors restarting
  double delta_re = 1.0;          // resampling work as a fraction of iteration work
  std::size_t n_part = 5;         // jackknife partitions per layer
  double p_re = 5.0;              // percentile of resampled norms
  std::size_t min_resample = 10;  // lower bound on resampled estimates
  std::size_t max_resample = 10000;
  std::size_t m_min = 5;
  std::size_t m_min_restart = 50;
  std::size_t max_hierarchy_size = 100;
  std::size_t max_layer_samples = 10'000'000;
  Clipping clipping = Clipping::kNone;
  double cost_ratio_samp = 0.01;  // C_samp / C_grad
  double cost_aggr = 0.0;         // C_aggr in units of C_grad
  double norm_floor = 1e-24;      // floor on squared gradient norms

  // Throws MiceError(kConfig) naming the first violated bound.
  void validate() const;
};

}  // namespace mice
