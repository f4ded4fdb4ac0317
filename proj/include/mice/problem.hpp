#pragma once

#include "mice/common.hpp"
#include "mice/rng.hpp"

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>

namespace mice {

// One draw of the random input. Infinite populations store theta; finite
// populations store a data index in [0, N). Reusing an event at two design
// points yields the coupled pair behind a gradient-difference sample.
struct RandomEvent {
  std::size_t index = 0;
  Vector theta;

  static RandomEvent from_index(std::size_t i) { return RandomEvent{i, Vector()}; }
  static RandomEvent from_theta(Vector t) { return RandomEvent{0, std::move(t)}; }
};

struct Optimum {
  Vector point;
  double value = 0.0;
};

// Smoothness constants of the mean objective: L (gradient Lipschitz), mu
// (strong convexity), and the per-sample almost-sure Lipschitz bound.
struct SmoothnessConstants {
  double lipschitz = 0.0;
  double strong_convexity = 0.0;
  double lipschitz_as = 0.0;
};

// Minimize F(xi) = E[f(xi, theta)] where the law of theta does not depend on
// xi. A problem whose randomness depends on xi should sample the underlying
// xi-free variable and apply the mapping inside gradient().
class StochasticProblem {
 public:
  virtual ~StochasticProblem() = default;

  virtual std::size_t dimension() const = 0;
  virtual Population population() const = 0;

  // Finite populations return a uniform index; infinite ones a draw of theta.
  virtual RandomEvent sample_event(RngStream& rng) const = 0;

  // Deterministic given (xi, event).
  virtual Vector gradient(const Vector& xi, const RandomEvent& event) const = 0;

  virtual std::optional<double> objective(const Vector& /*xi*/, const RandomEvent& /*e*/) const {
    return std::nullopt;
  }
  virtual std::optional<Vector> true_gradient(const Vector& /*xi*/) const { return std::nullopt; }
  virtual std::optional<double> true_objective(const Vector& /*xi*/) const { return std::nullopt; }
  virtual std::optional<Optimum> optimum() const { return std::nullopt; }
  virtual std::optional<SmoothnessConstants> constants() const { return std::nullopt; }
  // Covariance of gradient(xi, .) over events; used by the idealized optimizer.
  virtual std::optional<Matrix> gradient_covariance(const Vector& /*xi*/) const {
    return std::nullopt;
  }
};

// Decorator counting every gradient() call, for cross-checking the counters
// reported by estimators and optimizers.
class CountingProblem final : public StochasticProblem {
 public:
  explicit CountingProblem(const StochasticProblem& inner) : inner_(inner) {}

  std::uint64_t calls() const { return calls_.load(); }
  void reset() { calls_ = 0; }

  std::size_t dimension() const override { return inner_.dimension(); }
  Population population() const override { return inner_.population(); }
  RandomEvent sample_event(RngStream& rng) const override { return inner_.sample_event(rng); }
  Vector gradient(const Vector& xi, const RandomEvent& e) const override {
    ++calls_;
    return inner_.gradient(xi, e);
  }
  std::optional<double> objective(const Vector& xi, const RandomEvent& e) const override {
    return inner_.objective(xi, e);
  }
  std::optional<Vector> true_gradient(const Vector& xi) const override {
    return inner_.true_gradient(xi);
  }
  std::optional<double> true_objective(const Vector& xi) const override {
    return inner_.true_objective(xi);
  }
  std::optional<Optimum> optimum() const override { return inner_.optimum(); }
  std::optional<SmoothnessConstants> constants() const override { return inner_.constants(); }
  std::optional<Matrix> gradient_covariance(const Vector& xi) const override {
    return inner_.gradient_covariance(xi);
  }

 private:
  const StochasticProblem& inner_;
  mutable std::atomic<std::uint64_t> calls_{0};
};

}  // namespace mice
