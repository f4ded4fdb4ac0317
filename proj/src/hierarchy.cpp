#include "mice/hierarchy.hpp"

#include <algorithm>
#include <cmath>

namespace mice {

const char* to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::kDifference: return "difference";
    case LayerKind::kRawBase: return "raw_base";
    case LayerKind::kFrozenBase: return "frozen_base";
  }
  return "?";
}

std::size_t IndexSampler::draw(RngStream& rng) {
  if (drawn_ >= n_) {
    throw MiceError(ErrorCode::kInvalidArgument, "IndexSampler: population exhausted");
  }
  auto value_at = [this](std::size_t pos) {
    auto it = swaps_.find(pos);
    return it == swaps_.end() ? pos : it->second;
  };
  const std::size_t j = drawn_ + rng.uniform_index(n_ - drawn_);
  const std::size_t picked = value_at(j);
  swaps_[j] = value_at(drawn_);
  swaps_.erase(drawn_);
  ++drawn_;
  return picked;
}

LayerStats LayerStats::make(std::size_t iter, std::optional<std::size_t> prev, LayerKind kind,
                            Eigen::Index dim, std::size_t n_part, const Population& pop) {
  LayerStats layer;
  layer.iter = iter;
  layer.prev = prev;
  layer.kind = kind;
  layer.partitions.assign(n_part, WelfordAgg(dim));
  if (pop.is_finite()) layer.sampler = IndexSampler(*pop.size);
  return layer;
}

std::size_t LayerStats::samples() const {
  std::size_t m = 0;
  for (const auto& p : partitions) m += p.count;
  return m;
}

Eigen::Index LayerStats::dimension() const {
  if (kind == LayerKind::kFrozenBase) return frozen_vector.size();
  return partitions.empty() ? 0 : partitions.front().dimension();
}

void LayerStats::add(const Vector& sample, double roundoff_sq) {
  partitions[next_partition].add(sample);
  next_partition = (next_partition + 1) % partitions.size();
  roundoff_m2 += roundoff_sq;
}

WelfordAgg LayerStats::merged() const {
  WelfordAgg out(dimension());
  for (const auto& p : partitions) out = welford_merge(out, p);
  return out;
}

Vector LayerStats::mean() const {
  if (kind == LayerKind::kFrozenBase) return frozen_vector;
  return merged().mean;
}

void LayerStats::reset(const Population& pop) {
  const auto dim = dimension();
  for (auto& p : partitions) p = WelfordAgg(dim);
  next_partition = 0;
  roundoff_m2 = 0.0;
  sampled_indices.clear();
  sampler = pop.is_finite() ? IndexSampler(*pop.size) : IndexSampler();
  samples_at_start = 0;
}

double layer_variance(const LayerStats& layer) {
  if (layer.kind == LayerKind::kFrozenBase) return 0.0;
  const WelfordAgg agg = layer.merged();
  if (agg.count < 2 || agg.m2_total <= layer.roundoff_m2) return 0.0;
  return agg.sample_variance_total();
}

bool Hierarchy::has_sampled_layers() const {
  return std::any_of(layers.begin(), layers.end(),
                     [](const LayerStats& l) { return l.kind != LayerKind::kFrozenBase; });
}

std::vector<LayerLoad> Hierarchy::loads() const {
  std::vector<LayerLoad> out;
  out.reserve(layers.size());
  for (const auto& layer : layers) {
    out.push_back(LayerLoad{layer_variance(layer), layer.cost_weight(), layer.samples(),
                            layer.kind == LayerKind::kFrozenBase});
  }
  return out;
}

std::vector<std::size_t> Hierarchy::samples_at_start() const {
  std::vector<std::size_t> out;
  out.reserve(layers.size());
  for (const auto& layer : layers) out.push_back(layer.samples_at_start);
  return out;
}

Vector Hierarchy::estimate() const {
  if (layers.empty()) return Vector();
  Vector sum = Vector::Zero(layers.front().dimension());
  for (const auto& layer : layers) sum += layer.mean();
  return sum;
}

void Hierarchy::prune_design_points() {
  for (auto it = design_points.begin(); it != design_points.end();) {
    const bool used = std::any_of(layers.begin(), layers.end(), [&](const LayerStats& l) {
      return l.iter == it->first || (l.prev && *l.prev == it->first);
    });
    it = used ? std::next(it) : design_points.erase(it);
  }
}

StatError stat_error_sq(const Hierarchy& h) {
  const auto loads = h.loads();
  return stat_error_sq(loads, h.population);
}

SampleBounds sample_bounds(const MiceConfig& cfg, const Population& pop) {
  SampleBounds b{cfg.m_min, cfg.max_layer_samples};
  if (pop.is_finite()) b.m_min = std::min(b.m_min, *pop.size);
  return b;
}

std::vector<std::size_t> optimal_sample_sizes(const Hierarchy& h, double grad_norm_sq,
                                              double eps, const MiceConfig& cfg) {
  if (!(grad_norm_sq >= cfg.norm_floor)) {
    throw MiceError(ErrorCode::kZeroNorm, "optimal_sample_sizes: gradient norm below floor");
  }
  const auto loads = h.loads();
  return optimal_sample_sizes(loads, eps * eps * grad_norm_sq, sample_bounds(cfg, h.population),
                              h.population);
}

double incremental_work(const Hierarchy& h, std::span<const std::size_t> targets,
                        double cost_aggr) {
  const auto loads = h.loads();
  const auto baseline = h.samples_at_start();
  return incremental_work(loads, baseline, targets, cost_aggr);
}

double restart_cost(const Hierarchy& h, double grad_norm_sq, double eps, const MiceConfig& cfg) {
  if (!(grad_norm_sq >= cfg.norm_floor)) {
    throw MiceError(ErrorCode::kZeroNorm, "restart_cost: gradient norm below floor");
  }
  if (h.raw_grad_agg.count < 2) {
    throw MiceError(ErrorCode::kInvalidArgument, "restart_cost: need two raw gradient samples");
  }
  return restart_cost(h.raw_grad_agg.sample_variance_total(), eps * eps * grad_norm_sq,
                      cfg.m_min_restart);
}

double resample_norm(const Hierarchy& h, const MiceConfig& cfg, double budget_hint,
                     RngStream& rng) {
  if (h.layers.empty()) {
    throw MiceError(ErrorCode::kEmptyLayer, "resample_norm: empty hierarchy");
  }
  const Eigen::Index dim = h.layers.front().dimension();
  Vector fixed = Vector::Zero(dim);
  // complements[l][i]: mean of layer l without partition i.
  std::vector<std::vector<Vector>> complements;
  for (const auto& layer : h.layers) {
    if (layer.kind == LayerKind::kFrozenBase) {
      fixed += layer.frozen_vector;
      continue;
    }
    // A layer holding the whole finite population is exact.
    if (h.population.is_finite() && layer.samples() >= *h.population.size) {
      fixed += layer.mean();
      continue;
    }
    const std::size_t n_part = layer.partitions.size();
    std::vector<Vector> comp;
    comp.reserve(n_part);
    for (std::size_t i = 0; i < n_part; ++i) {
      if (layer.partitions[i].count == 0) {
        throw MiceError(ErrorCode::kEmptyLayer, "resample_norm: layer " +
                                                    std::to_string(layer.iter) +
                                                    " has an empty partition");
      }
      WelfordAgg rest(dim);
      for (std::size_t j = 0; j < n_part; ++j) {
        if (j != i) rest = welford_merge(rest, layer.partitions[j]);
      }
      comp.push_back(rest.mean);
    }
    complements.push_back(std::move(comp));
  }
  if (complements.empty()) return fixed.norm();

  const std::size_t n_samp =
      resample_count(cfg.delta_re, budget_hint, cfg.cost_ratio_samp, h.layers.size(),
                     cfg.min_resample, cfg.max_resample);
  std::vector<double> norms(n_samp);
  Vector acc(dim);
  for (std::size_t nu = 0; nu < n_samp; ++nu) {
    acc = fixed;
    for (const auto& comp : complements) acc += comp[rng.uniform_index(comp.size())];
    norms[nu] = acc.norm();
  }
  const std::size_t rank = percentile_rank(n_samp, cfg.p_re);
  std::nth_element(norms.begin(), norms.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                   norms.end());
  return norms[rank - 1];
}

ClipChoice clip_candidates_A(const Hierarchy& h, double grad_norm_sq, double eps,
                             const MiceConfig& cfg) {
  const auto loads = h.loads();
  const auto baseline = h.samples_at_start();
  const double tol_sq = eps * eps * grad_norm_sq;
  const double v_raw = h.raw_grad_agg.sample_variance_total();
  const SampleBounds bounds = sample_bounds(cfg, h.population);

  ClipChoice best;
  for (std::size_t pos = 0; pos < loads.size(); ++pos) {
    std::vector<LayerLoad> suffix(loads.begin() + static_cast<std::ptrdiff_t>(pos), loads.end());
    std::vector<std::size_t> paid(baseline.begin() + static_cast<std::ptrdiff_t>(pos),
                                  baseline.end());
    if (pos > 0) {
      suffix.front() = LayerLoad{v_raw, 1.0, 0, false};
      paid.front() = 0;
    }
    const auto targets = optimal_sample_sizes(suffix, tol_sq, bounds, h.population);
    const double work = incremental_work(suffix, paid, targets, cfg.cost_aggr);
    if (pos == 0 || work < best.work) best = ClipChoice{pos, h.layers[pos].iter, work};
  }
  return best;
}

std::optional<std::size_t> clip_B_level(const Hierarchy& h,
                                        std::span<const std::size_t> targets) {
  if (!h.population.is_finite()) return std::nullopt;
  const std::size_t n = *h.population.size;
  std::optional<std::size_t> level;
  for (std::size_t i = 0; i < h.layers.size() && i < targets.size(); ++i) {
    if (h.layers[i].kind != LayerKind::kFrozenBase && targets[i] >= n) level = i;
  }
  return level;
}

void collapse_to_frozen(Hierarchy& h, std::size_t position) {
  if (position >= h.layers.size()) {
    throw MiceError(ErrorCode::kInvalidArgument, "collapse_to_frozen: position out of range");
  }
  Vector frozen = Vector::Zero(h.layers.front().dimension());
  for (std::size_t i = 0; i <= position; ++i) {
    const auto& layer = h.layers[i];
    if (layer.kind != LayerKind::kFrozenBase && h.population.is_finite() &&
        layer.samples() < *h.population.size) {
      throw MiceError(ErrorCode::kInvalidArgument,
                      "collapse_to_frozen: layer " + std::to_string(layer.iter) +
                          " does not hold the full population");
    }
    frozen += layer.mean();
  }
  LayerStats base = LayerStats::make(h.layers[position].iter, std::nullopt,
                                     LayerKind::kFrozenBase, frozen.size(), 0, h.population);
  base.frozen_vector = std::move(frozen);
  h.layers.erase(h.layers.begin(), h.layers.begin() + static_cast<std::ptrdiff_t>(position) + 1);
  h.layers.insert(h.layers.begin(), std::move(base));
  h.prune_design_points();
}

}  // namespace mice
