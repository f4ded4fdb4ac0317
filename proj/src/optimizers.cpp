#include "mice/optimizers.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>

namespace mice {

StoppingRule StoppingRule::max_grad_evals(std::uint64_t budget) {
  StoppingRule r;
  r.kind = Kind::kMaxGradEvals;
  r.max_evals = budget;
  return r;
}

StoppingRule StoppingRule::grad_norm(double mu, double tol) {
  StoppingRule r;
  r.kind = Kind::kGradNorm;
  r.mu = mu;
  r.tol = tol;
  return r;
}

StoppingRule StoppingRule::max_iterations(std::size_t k) {
  StoppingRule r;
  r.kind = Kind::kMaxIters;
  r.max_iters = k;
  return r;
}

Stopping Stopping::operator|(const StoppingRule& r) const {
  Stopping out = *this;
  out.rules.push_back(r);
  return out;
}

bool Stopping::exhausted(std::size_t iter, std::uint64_t evals) const {
  for (const auto& r : rules) {
    if (r.kind == StoppingRule::Kind::kMaxGradEvals && evals >= r.max_evals) return true;
    if (r.kind == StoppingRule::Kind::kMaxIters && iter >= r.max_iters) return true;
  }
  return false;
}

bool Stopping::converged(double grad_norm) const {
  for (const auto& r : rules) {
    if (r.kind == StoppingRule::Kind::kGradNorm && grad_norm < r.mu * r.tol) return true;
  }
  return false;
}

double step_size_strongly_convex(double lipschitz, double mu, double eps) {
  if (!(mu > 0.0) || !(lipschitz >= mu) || !(eps >= 0.0)) {
    throw MiceError(ErrorCode::kInvalidArgument,
                    "step_size_strongly_convex: need L >= mu > 0 and eps >= 0");
  }
  return 2.0 / ((lipschitz + mu) * (1.0 + eps * eps));
}

Vector AdamState::direction(const Vector& g) {
  if (t == 0) {
    m = Vector::Zero(g.size());
    v = Vector::Zero(g.size());
  }
  ++t;
  m = beta1 * m + (1.0 - beta1) * g;
  v = beta2 * v + (1.0 - beta2) * g.cwiseProduct(g);
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  const Vector m_hat = m / c1;
  const Vector v_hat = v / c2;
  return m_hat.array() / (v_hat.array().sqrt() + eps);
}

namespace {

using Clock = std::chrono::steady_clock;

struct StepInfo {
  Vector direction;
  double grad_norm = 0.0;
  double stat_err = std::numeric_limits<double>::quiet_NaN();
  std::string action = "step";
  std::size_t hierarchy_len = 0;
  std::vector<LayerSummary> layers;
  bool stop = false;
  std::string stop_reason;
};

using EstimateFn = std::function<StepInfo(std::size_t, const Vector&)>;
using UpdateFn = std::function<Vector(std::size_t, const Vector&, const StepInfo&)>;
using EvalsFn = std::function<std::uint64_t()>;

RunSummary drive(const StochasticProblem& problem, const Vector& xi0, const RunOptions& opts,
                 double step, const EstimateFn& estimate, const UpdateFn& update,
                 const EvalsFn& evals) {
  require_same_dim(xi0.size(), static_cast<Eigen::Index>(problem.dimension()), "run");
  const auto optimum = opts.with_objective ? problem.optimum() : std::nullopt;
  const std::size_t stride = std::max<std::size_t>(opts.log_stride, 1);

  RunSummary out;
  out.step = step;
  const auto start = Clock::now();
  double telemetry_s = 0.0;
  auto elapsed = [&] {
    return std::chrono::duration<double>(Clock::now() - start).count() - telemetry_s;
  };

  auto emit = [&](std::size_t k, const Vector& xi, const StepInfo* s) {
    RunRecord r;
    r.iter = k;
    r.grad_evals_cum = evals();
    r.time_s = opts.record_time ? elapsed() : 0.0;
    const auto t0 = Clock::now();
    if (opts.with_objective) {
      if (auto f = problem.true_objective(xi)) {
        r.objective = *f;
        if (optimum) r.opt_gap = *f - optimum->value;
      }
    }
    r.xi = xi;
    if (s) {
      r.grad_norm_est = s->grad_norm;
      r.stat_err_sq = s->stat_err;
      r.action = s->action;
      r.hierarchy_len = s->hierarchy_len;
      r.layers = s->layers;
    } else {
      r.grad_norm_est = std::numeric_limits<double>::quiet_NaN();
      r.action = "end";
    }
    if (opts.sink) opts.sink(r);
    ++out.records;
    telemetry_s += std::chrono::duration<double>(Clock::now() - t0).count();
  };

  Vector xi = xi0;
  std::size_t k = 0;
  while (true) {
    if (opts.stop.exhausted(k, evals())) {
      out.stop_reason = "budget";
      emit(k, xi, nullptr);
      break;
    }
    const StepInfo s = estimate(k, xi);
    const bool done = s.stop || opts.stop.converged(s.grad_norm);
    const bool logged = done || k % stride == 0;
    if (logged) emit(k, xi, &s);
    if (done) {
      out.stop_reason = s.stop ? s.stop_reason : "grad_norm";
      break;
    }
    Vector next = update(k, xi, s);
    if (!next.allFinite()) {
      if (!logged) emit(k, xi, &s);
      throw MiceError(ErrorCode::kNonFinite,
                      "non-finite iterate after iteration " + std::to_string(k));
    }
    xi = std::move(next);
    ++k;
  }
  out.xi = xi;
  out.iterations = k;
  out.grad_evals = evals();
  return out;
}

double default_step(const StochasticProblem& problem, const RunOptions& opts, double eps,
                    const char* method) {
  if (opts.step) return *opts.step;
  const auto c = problem.constants();
  if (!c) {
    throw MiceError(ErrorCode::kInvalidArgument,
                    std::string(method) + ": problem has no (L, mu); supply a step size");
  }
  return step_size_strongly_convex(c->lipschitz, c->strong_convexity, eps);
}

StepInfo from_report(const EstimateReport& rep) {
  StepInfo s;
  s.direction = rep.gradient;
  s.grad_norm = rep.gradient.norm();
  s.stat_err = rep.stat_error_sq;
  s.action = to_string(rep.action);
  s.hierarchy_len = rep.layers.size();
  s.layers = rep.layers;
  s.stop = rep.stop;
  s.stop_reason = "zero_norm";
  return s;
}

Vector minibatch(const StochasticProblem& problem, const Vector& xi, std::size_t batch,
                 RngStream& rng, std::uint64_t& evals) {
  Vector g = Vector::Zero(xi.size());
  for (std::size_t j = 0; j < batch; ++j) g += problem.gradient(xi, problem.sample_event(rng));
  evals += batch;
  return g / static_cast<double>(batch);
}

std::size_t finite_size(const StochasticProblem& problem, const char* method) {
  const auto pop = problem.population();
  if (!pop.is_finite() || *pop.size == 0) {
    throw MiceError(ErrorCode::kInvalidArgument,
                    std::string(method) + ": requires a finite population");
  }
  return *pop.size;
}

SmoothnessConstants finite_constants(const StochasticProblem& problem, const char* method) {
  const auto c = problem.constants();
  if (!c) {
    throw MiceError(ErrorCode::kInvalidArgument,
                    std::string(method) + ": problem has no smoothness constants");
  }
  return *c;
}

Vector full_gradient(const StochasticProblem& problem, const Vector& xi, std::size_t n,
                     std::uint64_t& evals) {
  Vector g = Vector::Zero(xi.size());
  for (std::size_t i = 0; i < n; ++i) g += problem.gradient(xi, RandomEvent::from_index(i));
  evals += n;
  return g / static_cast<double>(n);
}

}  // namespace

RunSummary run_sgd_mice(const StochasticProblem& problem, const Vector& xi0, const MiceConfig& cfg,
                        const RunOptions& opts, RngStream rng) {
  const double step = default_step(problem, opts, cfg.eps, "sgd_mice");
  MiceEstimator est(problem, cfg, rng);
  return drive(
      problem, xi0, opts, step,
      [&](std::size_t, const Vector& xi) { return from_report(est.estimate(xi)); },
      [&](std::size_t, const Vector& xi, const StepInfo& s) {
        return Vector(xi - step * s.direction);
      },
      [&] { return est.gradient_evals(); });
}

RunSummary run_adam_mice(const StochasticProblem& problem, const Vector& xi0,
                         const MiceConfig& cfg, double step, const RunOptions& opts,
                         RngStream rng) {
  if (!(step > 0.0)) throw MiceError(ErrorCode::kInvalidArgument, "adam_mice: step must be > 0");
  MiceEstimator est(problem, cfg, rng);
  AdamState adam;
  return drive(
      problem, xi0, opts, step,
      [&](std::size_t, const Vector& xi) { return from_report(est.estimate(xi)); },
      [&](std::size_t, const Vector& xi, const StepInfo& s) {
        return Vector(xi - step * adam.direction(s.direction));
      },
      [&] { return est.gradient_evals(); });
}

RunSummary run_sgd_a(const StochasticProblem& problem, const Vector& xi0, const MiceConfig& cfg,
                     const RunOptions& opts, RngStream rng) {
  const double step = default_step(problem, opts, cfg.eps, "sgd_a");
  MiceEstimator est(problem, cfg, rng);
  return drive(
      problem, xi0, opts, step,
      [&](std::size_t, const Vector& xi) { return from_report(est.estimate_monte_carlo(xi)); },
      [&](std::size_t, const Vector& xi, const StepInfo& s) {
        return Vector(xi - step * s.direction);
      },
      [&] { return est.gradient_evals(); });
}

RunSummary run_idealized_sgd_mice(const StochasticProblem& problem, const Vector& xi0, double eps,
                                  const RunOptions& opts, RngStream rng) {
  if (!(eps >= 0.0)) throw MiceError(ErrorCode::kInvalidArgument, "idealized: eps must be >= 0");
  const double step = default_step(problem, opts, eps, "idealized_sgd_mice");
  std::uint64_t evals = 0;
  return drive(
      problem, xi0, opts, step,
      [&](std::size_t, const Vector& xi) {
        auto g = problem.true_gradient(xi);
        auto cov = problem.gradient_covariance(xi);
        if (!g || !cov) {
          throw MiceError(ErrorCode::kInvalidArgument,
                          "idealized: problem needs a true gradient and a covariance");
        }
        ++evals;
        StepInfo s;
        s.direction = *g;
        const double trace = cov->trace();
        if (eps > 0.0 && trace > 0.0) {
          Eigen::SelfAdjointEigenSolver<Matrix> es(*cov);
          Vector ev = es.eigenvalues();
          if (ev.minCoeff() < -1e-10 * std::max(1.0, ev.maxCoeff())) {
            throw MiceError(ErrorCode::kInvalidArgument, "idealized: covariance is not PSD");
          }
          Vector z(ev.size());
          for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = std::sqrt(std::max(ev[i], 0.0)) * rng.normal();
          const Vector chi = es.eigenvectors() * z;
          s.direction += (eps * g->norm() / std::sqrt(trace)) * chi;
        }
        s.grad_norm = s.direction.norm();
        return s;
      },
      [&](std::size_t, const Vector& xi, const StepInfo& s) {
        return Vector(xi - step * s.direction);
      },
      [&] { return evals; });
}

RunSummary run_vanilla_sgd(const StochasticProblem& problem, const Vector& xi0,
                           const SgdSchedule& schedule, const RunOptions& opts, RngStream rng) {
  double scale = 0.0;
  if (schedule.scale) {
    scale = *schedule.scale;
  } else {
    const auto c = problem.constants();
    if (!c) throw MiceError(ErrorCode::kInvalidArgument, "sgd: supply a step scale");
    scale = 1.0 / c->lipschitz;
  }
  if (schedule.batch == 0) throw MiceError(ErrorCode::kInvalidArgument, "sgd: batch must be >= 1");
  std::uint64_t evals = 0;
  return drive(
      problem, xi0, opts, scale,
      [&](std::size_t, const Vector& xi) {
        StepInfo s;
        s.direction = minibatch(problem, xi, schedule.batch, rng, evals);
        s.grad_norm = s.direction.norm();
        return s;
      },
      [&](std::size_t k, const Vector& xi, const StepInfo& s) {
        const double eta = scale / (1.0 + static_cast<double>(k) / schedule.decay);
        return Vector(xi - eta * s.direction);
      },
      [&] { return evals; });
}

RunSummary run_adam(const StochasticProblem& problem, const Vector& xi0, double scale,
                    std::size_t batch, const RunOptions& opts, RngStream rng) {
  if (!(scale > 0.0) || batch == 0) {
    throw MiceError(ErrorCode::kInvalidArgument, "adam: need scale > 0 and batch >= 1");
  }
  std::uint64_t evals = 0;
  AdamState adam;
  return drive(
      problem, xi0, opts, scale,
      [&](std::size_t, const Vector& xi) {
        StepInfo s;
        s.direction = minibatch(problem, xi, batch, rng, evals);
        s.grad_norm = s.direction.norm();
        return s;
      },
      [&](std::size_t k, const Vector& xi, const StepInfo& s) {
        const double eta = scale / std::sqrt(static_cast<double>(k + 1));
        return Vector(xi - eta * adam.direction(s.direction));
      },
      [&] { return evals; });
}

RunSummary run_svrg(const StochasticProblem& problem, const Vector& xi0, std::size_t batch,
                    const RunOptions& opts, RngStream rng) {
  const std::size_t n = finite_size(problem, "svrg");
  const auto c = finite_constants(problem, "svrg");
  const double step = opts.step.value_or(FiniteSumSteps::svrg(c.lipschitz_as));
  const std::size_t epoch = (n + batch - 1) / batch;
  std::uint64_t evals = 0;
  Vector anchor;
  Vector anchor_grad;
  return drive(
      problem, xi0, opts, step,
      [&](std::size_t k, const Vector& xi) {
        StepInfo s;
        if (k % epoch == 0) {
          anchor = xi;
          anchor_grad = full_gradient(problem, xi, n, evals);
          s.action = "anchor";
        }
        Vector v = Vector::Zero(xi.size());
        for (std::size_t j = 0; j < batch; ++j) {
          const RandomEvent e = problem.sample_event(rng);
          v += problem.gradient(xi, e) - problem.gradient(anchor, e);
        }
        evals += 2 * batch;
        s.direction = v / static_cast<double>(batch) + anchor_grad;
        s.grad_norm = s.direction.norm();
        return s;
      },
      [&](std::size_t, const Vector& xi, const StepInfo& s) {
        return Vector(xi - step * s.direction);
      },
      [&] { return evals; });
}

RunSummary run_sarah(const StochasticProblem& problem, const Vector& xi0, std::size_t batch,
                     const RunOptions& opts, RngStream rng) {
  const std::size_t n = finite_size(problem, "sarah");
  const auto c = finite_constants(problem, "sarah");
  const double step = opts.step.value_or(FiniteSumSteps::sarah(c.lipschitz_as));
  const std::size_t epoch = (n + batch - 1) / batch;
  std::uint64_t evals = 0;
  Vector prev_xi;
  Vector v;
  return drive(
      problem, xi0, opts, step,
      [&](std::size_t k, const Vector& xi) {
        StepInfo s;
        if (k % epoch == 0) {
          v = full_gradient(problem, xi, n, evals);
          s.action = "anchor";
        } else {
          Vector d = Vector::Zero(xi.size());
          for (std::size_t j = 0; j < batch; ++j) {
            const RandomEvent e = problem.sample_event(rng);
            d += problem.gradient(xi, e) - problem.gradient(prev_xi, e);
          }
          evals += 2 * batch;
          v += d / static_cast<double>(batch);
        }
        prev_xi = xi;
        s.direction = v;
        s.grad_norm = v.norm();
        return s;
      },
      [&](std::size_t, const Vector& xi, const StepInfo& s) {
        return Vector(xi - step * s.direction);
      },
      [&] { return evals; });
}

namespace {

// Shared table logic of SAG (biased average) and SAGA (unbiased correction).
RunSummary run_table_method(const StochasticProblem& problem, const Vector& xi0,
                            std::size_t batch, const RunOptions& opts, RngStream rng, bool saga) {
  const char* name = saga ? "saga" : "sag";
  const std::size_t n = finite_size(problem, name);
  const auto c = finite_constants(problem, name);
  const double step = opts.step.value_or(
      saga ? FiniteSumSteps::saga(c.lipschitz_as, c.strong_convexity, n)
           : FiniteSumSteps::sag(c.lipschitz_as, c.strong_convexity, n));
  const auto d = xi0.size();
  Matrix table = Matrix::Zero(d, static_cast<Eigen::Index>(n));
  Vector sum = Vector::Zero(d);
  std::uint64_t evals = 0;
  return drive(
      problem, xi0, opts, step,
      [&](std::size_t, const Vector& xi) {
        StepInfo s;
        Vector correction = Vector::Zero(d);
        for (std::size_t j = 0; j < batch; ++j) {
          const RandomEvent e = problem.sample_event(rng);
          const auto col = static_cast<Eigen::Index>(e.index);
          const Vector g = problem.gradient(xi, e);
          const Vector diff = g - table.col(col);
          correction += diff;
          sum += diff;
          table.col(col) = g;
        }
        evals += batch;
        const Vector avg = sum / static_cast<double>(n);
        if (saga) {
          // Correction uses the table before this batch's update; avg already
          // includes the update, so remove its share.
          s.direction = correction / static_cast<double>(batch) + avg -
                        correction / static_cast<double>(n);
        } else {
          s.direction = avg;
        }
        s.grad_norm = s.direction.norm();
        return s;
      },
      [&](std::size_t, const Vector& xi, const StepInfo& s) {
        return Vector(xi - step * s.direction);
      },
      [&] { return evals; });
}

}  // namespace

RunSummary run_sag(const StochasticProblem& problem, const Vector& xi0, std::size_t batch,
                   const RunOptions& opts, RngStream rng) {
  return run_table_method(problem, xi0, batch, opts, rng, false);
}

RunSummary run_saga(const StochasticProblem& problem, const Vector& xi0, std::size_t batch,
                    const RunOptions& opts, RngStream rng) {
  return run_table_method(problem, xi0, batch, opts, rng, true);
}

}  // namespace mice
