#include "mice/estimator.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

namespace mice {

const char* to_string(Action a) {
  switch (a) {
    case Action::kRegular: return "regular";
    case Action::kDropped: return "dropped";
    case Action::kRestarted: return "restarted";
    case Action::kClipped: return "clipped";
  }
  return "?";
}

namespace {

// Squared bound on the rounding error of g_a - g_b; difference layers whose
// spread stays below the accumulated bound report zero variance.
double roundoff_sq(const Vector& a, const Vector& b) {
  const double r = 16.0 * DBL_EPSILON * (a.norm() + b.norm());
  return r * r;
}

std::size_t capped(std::size_t m, const Population& pop) {
  return pop.is_finite() ? std::min(m, *pop.size) : m;
}

}  // namespace

MiceEstimator::MiceEstimator(const StochasticProblem& problem, MiceConfig cfg, RngStream rng)
    : problem_(problem),
      cfg_(cfg),
      events_rng_(rng.derive(0)),
      resample_rng_(rng.derive(1)) {
  cfg_.validate();
  h_.population = problem_.population();
}

Vector MiceEstimator::grad(std::size_t iter, const RandomEvent& e) {
  ++evals_;
  Vector g = problem_.gradient(h_.design_points.at(iter), e);
  if (!g.allFinite()) {
    throw MiceError(ErrorCode::kNonFinite,
                    "gradient is not finite at iteration " + std::to_string(iter));
  }
  return g;
}

RandomEvent MiceEstimator::draw_event(LayerStats& layer) {
  if (h_.population.is_finite()) {
    const std::size_t i = layer.sampler.draw(events_rng_);
    layer.sampled_indices.push_back(i);
    return RandomEvent::from_index(i);
  }
  return problem_.sample_event(events_rng_);
}

void MiceEstimator::sample_layer(LayerStats& layer, std::size_t count) {
  const bool at_current = layer.iter == k_;
  for (std::size_t j = 0; j < count; ++j) {
    const RandomEvent e = draw_event(layer);
    const Vector g = grad(layer.iter, e);
    if (at_current) h_.raw_grad_agg.add(g);
    if (layer.kind == LayerKind::kDifference) {
      const Vector g_prev = grad(*layer.prev, e);
      layer.add(g - g_prev, roundoff_sq(g, g_prev));
    } else {
      layer.add(g);
    }
  }
}

void MiceEstimator::restart_at(std::size_t iter, std::size_t samples) {
  const auto dim = static_cast<Eigen::Index>(problem_.dimension());
  h_.layers.clear();
  h_.layers.push_back(
      LayerStats::make(iter, std::nullopt, LayerKind::kRawBase, dim, cfg_.n_part, h_.population));
  h_.prune_design_points();
  if (iter == k_) h_.raw_grad_agg = WelfordAgg(dim);
  sample_layer(h_.layers.back(), capped(samples, h_.population));
}

double MiceEstimator::budget_hint() const {
  const double n2 = h_.estimate().squaredNorm();
  if (!(n2 >= cfg_.norm_floor)) return 0.0;
  const auto targets = optimal_sample_sizes(h_, n2, cfg_.eps, cfg_);
  return incremental_work(h_, targets, cfg_.cost_aggr);
}

void MiceEstimator::converge(EstimateReport& rep, bool allow_clip) {
  const double eps_sq = cfg_.eps * cfg_.eps;
  while (true) {
    if (!h_.has_sampled_layers()) {
      rep.resampled_norm = h_.estimate().norm();
      return;
    }
    const double norm = resample_norm(h_, cfg_, budget_hint(), resample_rng_);
    rep.resampled_norm = norm;
    if (!(norm * norm >= cfg_.norm_floor)) {
      rep.stop = true;
      return;
    }
    const auto targets = optimal_sample_sizes(h_, norm * norm, cfg_.eps, cfg_);

    if (allow_clip && cfg_.clipping == Clipping::kB) {
      if (const auto level = clip_B_level(h_, targets)) {
        const std::size_t n = *h_.population.size;
        for (std::size_t i = 0; i <= *level; ++i) {
          auto& layer = h_.layers[i];
          if (layer.kind != LayerKind::kFrozenBase) sample_layer(layer, n - layer.samples());
        }
        rep.clipped_at = h_.layers[*level].iter;
        collapse_to_frozen(h_, *level);
        continue;
      }
    }

    const StatError err = stat_error_sq(h_);
    if (!err.warmup && err.value <= eps_sq * norm * norm) return;

    bool grew = false;
    for (std::size_t i = 0; i < h_.layers.size(); ++i) {
      auto& layer = h_.layers[i];
      if (layer.kind == LayerKind::kFrozenBase) continue;
      const std::size_t m = layer.samples();
      if (targets[i] > m) {
        sample_layer(layer, targets[i] - m);
        grew = true;
      }
    }
    if (!grew) {
      rep.cap_hit = true;
      return;
    }
  }
}

void MiceEstimator::finish(EstimateReport& rep, std::uint64_t evals_before) {
  rep.iteration = k_;
  rep.gradient = h_.estimate();
  const StatError err = stat_error_sq(h_);
  rep.stat_error_sq = err.value;
  rep.warmup = err.warmup;
  rep.new_gradient_evals = evals_ - evals_before;
  rep.layers.clear();
  for (const auto& layer : h_.layers) {
    rep.layers.push_back(LayerSummary{layer.iter, layer.samples(), layer_variance(layer),
                                      layer.kind});
  }
  if (rep.restarted) {
    rep.action = Action::kRestarted;
  } else if (rep.clipped_at) {
    rep.action = Action::kClipped;
  } else if (rep.dropped) {
    rep.action = Action::kDropped;
  }
  for (auto& layer : h_.layers) layer.samples_at_start = layer.samples();
  ++k_;
}

EstimateReport MiceEstimator::estimate(const Vector& xi) {
  require_same_dim(xi.size(), static_cast<Eigen::Index>(problem_.dimension()), "estimate");
  const std::uint64_t evals_before = evals_;
  const auto dim = xi.size();
  EstimateReport rep;
  h_.design_points[k_] = xi;
  h_.raw_grad_agg = WelfordAgg(dim);

  if (h_.empty()) {
    restart_at(k_, cfg_.m_min_restart);
    rep.restarted = true;
    converge(rep, true);
    finish(rep, evals_before);
    return rep;
  }

  // Probe: m_min shared events evaluated at xi_k, xi_{k-1} and, when the top
  // layer is a difference layer, at its predecessor, filling both candidate
  // layers for k at once.
  const LayerStats& top = h_.top();
  const std::size_t prev = top.iter;
  const bool can_drop = top.kind == LayerKind::kDifference;
  const std::size_t grand = can_drop ? *top.prev : 0;

  LayerStats keep =
      LayerStats::make(k_, prev, LayerKind::kDifference, dim, cfg_.n_part, h_.population);
  LayerStats drop =
      LayerStats::make(k_, grand, LayerKind::kDifference, dim, cfg_.n_part, h_.population);
  const std::size_t probe = capped(cfg_.m_min, h_.population);
  for (std::size_t j = 0; j < probe; ++j) {
    const RandomEvent e = draw_event(keep);
    const Vector g = grad(k_, e);
    const Vector g_prev = grad(prev, e);
    h_.raw_grad_agg.add(g);
    keep.add(g - g_prev, roundoff_sq(g, g_prev));
    if (can_drop) {
      const Vector g_grand = grad(grand, e);
      drop.add(g - g_grand, roundoff_sq(g, g_grand));
    }
  }

  if (can_drop && should_drop(layer_variance(drop), layer_variance(top), layer_variance(keep),
                              cfg_.delta_drop)) {
    drop.sampled_indices = keep.sampled_indices;
    drop.sampler = keep.sampler;
    h_.layers.pop_back();
    h_.layers.push_back(std::move(drop));
    h_.prune_design_points();
    rep.dropped = true;
  } else {
    h_.layers.push_back(std::move(keep));
  }

  if (h_.layers.size() > cfg_.max_hierarchy_size) {
    restart_at(k_, cfg_.m_min_restart);
    rep.restarted = true;
  } else {
    const double norm = resample_norm(h_, cfg_, budget_hint(), resample_rng_);
    if (!(norm * norm >= cfg_.norm_floor)) {
      rep.resampled_norm = norm;
      rep.stop = true;
      finish(rep, evals_before);
      return rep;
    }
    const auto targets = optimal_sample_sizes(h_, norm * norm, cfg_.eps, cfg_);
    const double work = incremental_work(h_, targets, cfg_.cost_aggr);
    const double rest = restart_cost(h_, norm * norm, cfg_.eps, cfg_);
    if (should_restart(rest, work, cfg_.delta_rest)) {
      restart_at(k_, cfg_.m_min_restart);
      rep.restarted = true;
    } else if (cfg_.clipping == Clipping::kA && h_.layers.size() >= 2) {
      const ClipChoice choice = clip_candidates_A(h_, norm * norm, cfg_.eps, cfg_);
      if (choice.position > 0) {
        h_.layers.erase(h_.layers.begin(),
                        h_.layers.begin() + static_cast<std::ptrdiff_t>(choice.position));
        auto& base = h_.layers.front();
        base.kind = LayerKind::kRawBase;
        base.prev.reset();
        base.reset(h_.population);
        h_.prune_design_points();
        sample_layer(base, capped(cfg_.m_min, h_.population));
        rep.clipped_at = base.iter;
      }
    }
  }

  converge(rep, true);
  finish(rep, evals_before);
  return rep;
}

EstimateReport MiceEstimator::estimate_monte_carlo(const Vector& xi) {
  require_same_dim(xi.size(), static_cast<Eigen::Index>(problem_.dimension()),
                   "estimate_monte_carlo");
  const std::uint64_t evals_before = evals_;
  EstimateReport rep;
  h_.design_points[k_] = xi;
  restart_at(k_, cfg_.m_min);
  converge(rep, false);
  finish(rep, evals_before);
  return rep;
}

}  // namespace mice
