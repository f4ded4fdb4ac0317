#pragma once

#include "mice/config.hpp"
#include "mice/hierarchy.hpp"
#include "mice/problem.hpp"
#include "mice/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace mice {

enum class Action { kRegular, kDropped, kRestarted, kClipped };

const char* to_string(Action a);

struct LayerSummary {
  std::size_t iter = 0;
  std::size_t samples = 0;
  double variance = 0.0;
  LayerKind kind = LayerKind::kRawBase;
};

struct EstimateReport {
  std::size_t iteration = 0;
  Vector gradient;
  double stat_error_sq = 0.0;
  double resampled_norm = 0.0;
  // Highest-priority event of the iteration: restart > clip > drop.
  Action action = Action::kRegular;
  bool dropped = false;
  bool restarted = false;
  std::optional<std::size_t> clipped_at;  // iteration index of the new base
  std::uint64_t new_gradient_evals = 0;
  std::vector<LayerSummary> layers;
  bool cap_hit = false;  // sampling stopped at max_layer_samples or N
  bool stop = false;     // gradient norm estimate fell below the floor
  bool warmup = false;
};

// Multi-iteration gradient estimator. Call estimate() once per optimizer
// iteration with the new iterate; the hierarchy of past iterates is kept
// between calls.
class MiceEstimator {
 public:
  MiceEstimator(const StochasticProblem& problem, MiceConfig cfg, RngStream rng);

  EstimateReport estimate(const Vector& xi);

  // Plain Monte Carlo estimate at xi with the same relative error control and
  // no reuse of past iterates (the SGD-A baseline).
  EstimateReport estimate_monte_carlo(const Vector& xi);

  const Hierarchy& hierarchy() const { return h_; }
  const MiceConfig& config() const { return cfg_; }
  std::size_t iteration() const { return k_; }
  std::uint64_t gradient_evals() const { return evals_; }

 private:
  Vector grad(std::size_t iter, const RandomEvent& e);
  RandomEvent draw_event(LayerStats& layer);
  void sample_layer(LayerStats& layer, std::size_t count);
  void restart_at(std::size_t iter, std::size_t samples);
  double budget_hint() const;
  void converge(EstimateReport& rep, bool allow_clip);
  void finish(EstimateReport& rep, std::uint64_t evals_before);

  const StochasticProblem& problem_;
  MiceConfig cfg_;
  RngStream events_rng_;
  RngStream resample_rng_;
  Hierarchy h_;
  std::size_t k_ = 0;
  std::uint64_t evals_ = 0;
};

}  // namespace mice
