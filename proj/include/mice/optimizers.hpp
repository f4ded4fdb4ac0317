#pragma once

#include "mice/config.hpp"
#include "mice/estimator.hpp"
#include "mice/problem.hpp"
#include "mice/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace mice {

struct StoppingRule {
  enum class Kind { kMaxGradEvals, kGradNorm, kMaxIters };

  Kind kind = Kind::kMaxIters;
  std::uint64_t max_evals = 0;
  double mu = 0.0;
  double tol = 0.0;
  std::size_t max_iters = 0;

  static StoppingRule max_grad_evals(std::uint64_t budget);
  // Stop once the gradient estimate's norm drops below mu * tol.
  static StoppingRule grad_norm(double mu, double tol);
  static StoppingRule max_iterations(std::size_t k);
};

// Rules combined by OR.
struct Stopping {
  std::vector<StoppingRule> rules;

  Stopping() = default;
  Stopping(StoppingRule r) : rules{r} {}  // NOLINT(google-explicit-constructor)

  Stopping operator|(const StoppingRule& r) const;
  // Budget-type rules, checked before computing the next gradient.
  bool exhausted(std::size_t iter, std::uint64_t evals) const;
  bool converged(double grad_norm) const;
};

struct RunRecord {
  std::size_t iter = 0;
  std::uint64_t grad_evals_cum = 0;
  double time_s = 0.0;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double opt_gap = std::numeric_limits<double>::quiet_NaN();
  double grad_norm_est = 0.0;
  double stat_err_sq = std::numeric_limits<double>::quiet_NaN();
  std::string action = "step";
  std::size_t hierarchy_len = 0;
  // Not serialized.
  Vector xi;
  std::vector<LayerSummary> layers;
};

using RecordSink = std::function<void(const RunRecord&)>;

struct RunOptions {
  Stopping stop = StoppingRule::max_iterations(1000);
  std::optional<double> step;  // overrides the method's default step size
  std::size_t log_stride = 1;  // emit every log_stride-th iteration (and the last)
  bool with_objective = true;  // evaluate F and the gap when the problem allows
  bool record_time = true;
  RecordSink sink;
};

struct RunSummary {
  Vector xi;
  std::size_t iterations = 0;
  std::uint64_t grad_evals = 0;
  std::size_t records = 0;
  std::string stop_reason;
  double step = 0.0;
};

double step_size_strongly_convex(double lipschitz, double mu, double eps);

// Adam moments; step() returns the update direction m_hat / (sqrt(v_hat) + eps).
struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::size_t t = 0;
  Vector m;
  Vector v;

  Vector direction(const Vector& g);
};

RunSummary run_sgd_mice(const StochasticProblem& problem, const Vector& xi0, const MiceConfig& cfg,
                        const RunOptions& opts, RngStream rng);
RunSummary run_adam_mice(const StochasticProblem& problem, const Vector& xi0,
                         const MiceConfig& cfg, double step, const RunOptions& opts,
                         RngStream rng);
RunSummary run_sgd_a(const StochasticProblem& problem, const Vector& xi0, const MiceConfig& cfg,
                     const RunOptions& opts, RngStream rng);
// Exact gradient plus Gaussian noise with covariance scaled to relative size eps.
RunSummary run_idealized_sgd_mice(const StochasticProblem& problem, const Vector& xi0, double eps,
                                  const RunOptions& opts, RngStream rng);

struct SgdSchedule {
  // eta_k = scale / (1 + k / decay); defaults give 1 / (L (1 + k/50)).
  std::optional<double> scale;
  double decay = 50.0;
  std::size_t batch = 10;
};
RunSummary run_vanilla_sgd(const StochasticProblem& problem, const Vector& xi0,
                           const SgdSchedule& schedule, const RunOptions& opts, RngStream rng);

// Minibatch Adam with eta_k = scale / sqrt(k), k >= 1.
RunSummary run_adam(const StochasticProblem& problem, const Vector& xi0, double scale,
                    std::size_t batch, const RunOptions& opts, RngStream rng);

// Finite-sum methods. Steps default to the reference choices built from
// (L_as, mu, N); SVRG and SARAH take N/batch inner steps per epoch.
struct FiniteSumSteps {
  static double sag(double l_as, double mu, std::size_t n) { return 1.0 / (16.0 * (l_as + mu * n)); }
  static double saga(double l_as, double mu, std::size_t n) { return 1.0 / (2.0 * (l_as + mu * n)); }
  static double sarah(double l_as) { return 1.0 / (2.0 * l_as); }
  static double svrg(double l_as) { return 1.0 / (2.0 * l_as); }
};

RunSummary run_svrg(const StochasticProblem& problem, const Vector& xi0, std::size_t batch,
                    const RunOptions& opts, RngStream rng);
RunSummary run_sarah(const StochasticProblem& problem, const Vector& xi0, std::size_t batch,
                     const RunOptions& opts, RngStream rng);
RunSummary run_sag(const StochasticProblem& problem, const Vector& xi0, std::size_t batch,
                   const RunOptions& opts, RngStream rng);
RunSummary run_saga(const StochasticProblem& problem, const Vector& xi0, std::size_t batch,
                    const RunOptions& opts, RngStream rng);

}  // namespace mice
