#pragma once

#include "mice/common.hpp"
#include "mice/config.hpp"
#include "mice/rng.hpp"
#include "mice/rules.hpp"
#include "mice/welford.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace mice {

enum class LayerKind { kDifference, kRawBase, kFrozenBase };

const char* to_string(LayerKind kind);

// Distinct uniform draws from [0, N) without storing a permutation
// (sparse Fisher-Yates).
class IndexSampler {
 public:
  IndexSampler() = default;
  explicit IndexSampler(std::size_t n) : n_(n) {}

  std::size_t draw(RngStream& rng);
  std::size_t population() const { return n_; }
  std::size_t drawn() const { return drawn_; }
  std::size_t remaining() const { return n_ - drawn_; }

 private:
  std::size_t n_ = 0;
  std::size_t drawn_ = 0;
  std::unordered_map<std::size_t, std::size_t> swaps_;
};

// One level of the hierarchy: samples of the gradient difference between
// iterate `iter` and its predecessor `prev` (or raw gradients for the base),
// spread round-robin over n_part Welford partitions.
struct LayerStats {
  std::size_t iter = 0;
  std::optional<std::size_t> prev;
  LayerKind kind = LayerKind::kRawBase;
  std::vector<WelfordAgg> partitions;
  std::size_t next_partition = 0;
  // Sum of squared bounds on the floating-point cancellation error of each
  // difference sample; variance at or below this level is reported as zero.
  double roundoff_m2 = 0.0;
  Vector frozen_vector;
  std::vector<std::size_t> sampled_indices;
  IndexSampler sampler;
  // Samples already paid for when the current iteration started.
  std::size_t samples_at_start = 0;

  static LayerStats make(std::size_t iter, std::optional<std::size_t> prev, LayerKind kind,
                         Eigen::Index dim, std::size_t n_part, const Population& pop);

  std::size_t samples() const;
  double cost_weight() const { return kind == LayerKind::kDifference ? 2.0 : 1.0; }
  bool is_base() const { return kind != LayerKind::kDifference; }
  Eigen::Index dimension() const;

  void add(const Vector& sample, double roundoff_sq = 0.0);
  WelfordAgg merged() const;
  // Sample mean of the layer, or the frozen vector.
  Vector mean() const;
  // Drop all samples (keeps identity, kind, and partition count).
  void reset(const Population& pop);
};

// Sample variance of the merged partitions; 0 when frozen, below two
// samples, or at floating-point cancellation level.
double layer_variance(const LayerStats& layer);

struct Hierarchy {
  std::vector<LayerStats> layers;
  std::map<std::size_t, Vector> design_points;
  Population population;
  WelfordAgg raw_grad_agg;

  bool empty() const { return layers.empty(); }
  const LayerStats& top() const { return layers.back(); }
  bool has_sampled_layers() const;

  std::vector<LayerLoad> loads() const;
  std::vector<std::size_t> samples_at_start() const;
  // Sum of layer means plus any frozen vector.
  Vector estimate() const;
  // Remove design points no layer references.
  void prune_design_points();
};

StatError stat_error_sq(const Hierarchy& h);

SampleBounds sample_bounds(const MiceConfig& cfg, const Population& pop);

// Throws MiceError(kZeroNorm) when grad_norm_sq is below cfg.norm_floor.
std::vector<std::size_t> optimal_sample_sizes(const Hierarchy& h, double grad_norm_sq,
                                              double eps, const MiceConfig& cfg);

// Work relative to the samples each layer held at the start of the iteration.
double incremental_work(const Hierarchy& h, std::span<const std::size_t> targets,
                        double cost_aggr);

// Uses the raw-gradient variance at the current iterate. Requires at least two
// raw samples.
double restart_cost(const Hierarchy& h, double grad_norm_sq, double eps, const MiceConfig& cfg);

// Jackknife percentile of the estimate norm. Throws kEmptyLayer if a sampled
// layer has an empty partition. Layers holding a whole finite population count as exact.
double resample_norm(const Hierarchy& h, const MiceConfig& cfg, double budget_hint,
                     RngStream& rng);

struct ClipChoice {
  std::size_t position = 0;  // index into layers; 0 means keep everything
  std::size_t iter = 0;
  double work = 0.0;
};

// Cheapest suffix of the hierarchy. A clipped suffix's new base is costed from
// scratch with the raw-gradient variance at the current iterate.
ClipChoice clip_candidates_A(const Hierarchy& h, double grad_norm_sq, double eps,
                             const MiceConfig& cfg);

// Largest layer position whose target saturates the finite population.
std::optional<std::size_t> clip_B_level(const Hierarchy& h, std::span<const std::size_t> targets);

// Replace layers [0, position] by one frozen base at layers[position].iter.
// Every collapsed layer must hold the full population.
void collapse_to_frozen(Hierarchy& h, std::size_t position);

}  // namespace mice
