#pragma once

#include "mice/dataset.hpp"
#include "mice/problem.hpp"

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace mice {

// f(xi, theta) = xi.H(theta).xi / 2 - b.xi with H(theta) = I + theta A,
// A = [[2 kappa - 1, 0.5], [0.5, 0]], theta ~ U(0, 1), b = (1, 1).
class QuadraticProblem final : public StochasticProblem {
 public:
  explicit QuadraticProblem(double kappa);

  static Vector default_start() { return Vector{{20.0, 50.0}}; }

  double kappa() const { return kappa_; }
  const Matrix& mean_hessian() const { return mean_h_; }

  std::size_t dimension() const override { return 2; }
  Population population() const override { return Population::infinite(); }
  RandomEvent sample_event(RngStream& rng) const override;
  Vector gradient(const Vector& xi, const RandomEvent& e) const override;
  std::optional<double> objective(const Vector& xi, const RandomEvent& e) const override;
  std::optional<Vector> true_gradient(const Vector& xi) const override;
  std::optional<double> true_objective(const Vector& xi) const override;
  std::optional<Optimum> optimum() const override;
  std::optional<SmoothnessConstants> constants() const override;
  std::optional<Matrix> gradient_covariance(const Vector& xi) const override;

 private:
  double kappa_;
  Matrix a_;
  Matrix mean_h_;
  Vector b_;
  Optimum opt_;
  SmoothnessConstants consts_;
};

// f(xi, theta) = (xi + theta0 1).H.(xi + theta1 1), theta0, theta1 ~ N(0, sigma^2).
// Gradient differences between two iterates do not depend on theta.
class ShiftedQuadraticProblem final : public StochasticProblem {
 public:
  explicit ShiftedQuadraticProblem(double sigma);

  std::size_t dimension() const override { return 2; }
  Population population() const override { return Population::infinite(); }
  RandomEvent sample_event(RngStream& rng) const override;
  Vector gradient(const Vector& xi, const RandomEvent& e) const override;
  std::optional<double> objective(const Vector& xi, const RandomEvent& e) const override;
  std::optional<Vector> true_gradient(const Vector& xi) const override;
  std::optional<double> true_objective(const Vector& xi) const override;
  std::optional<Optimum> optimum() const override;
  std::optional<SmoothnessConstants> constants() const override;
  std::optional<Matrix> gradient_covariance(const Vector& xi) const override;

 private:
  double sigma_;
  Matrix h_;
  Matrix sym_;  // H + H^T
  Vector h1_;   // H 1
  Vector ht1_;  // H^T 1
};

// f(xi, theta) = (a - xi0 + theta0)^2 + b(-xi0^2 + xi1 + theta0^2 - theta1^2)^2,
// theta0, theta1 ~ N(0, sigma^2). The mean gradient is the deterministic
// Rosenbrock gradient.
class RosenbrockProblem final : public StochasticProblem {
 public:
  explicit RosenbrockProblem(double sigma, double a = 1.0, double b = 100.0);

  static Vector default_start() { return Vector{{-1.2, 1.0}}; }

  std::size_t dimension() const override { return 2; }
  Population population() const override { return Population::infinite(); }
  RandomEvent sample_event(RngStream& rng) const override;
  Vector gradient(const Vector& xi, const RandomEvent& e) const override;
  std::optional<double> objective(const Vector& xi, const RandomEvent& e) const override;
  std::optional<Vector> true_gradient(const Vector& xi) const override;
  std::optional<double> true_objective(const Vector& xi) const override;
  std::optional<Optimum> optimum() const override;
  // Monte Carlo estimate from 10^4 fixed-seed draws, cached per xi.
  std::optional<Matrix> gradient_covariance(const Vector& xi) const override;

 private:
  double sigma_;
  double a_;
  double b_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::pair<double, double>, Matrix> cov_cache_;
};

// l2-regularized log-loss over a finite dataset with labels in {-1, +1}.
class LogisticProblem final : public StochasticProblem {
 public:
  LogisticProblem(std::shared_ptr<const SparseDataset> data, double lambda);

  const SparseDataset& data() const { return *data_; }
  double lambda() const { return lambda_; }
  // Reference optimum supplied by the caller (e.g. a cached long run).
  void set_optimum(Optimum opt) { opt_ = std::move(opt); }

  std::size_t dimension() const override { return data_->n_features; }
  Population population() const override { return Population::finite(data_->rows()); }
  RandomEvent sample_event(RngStream& rng) const override;
  Vector gradient(const Vector& xi, const RandomEvent& e) const override;
  std::optional<double> objective(const Vector& xi, const RandomEvent& e) const override;
  std::optional<Vector> true_gradient(const Vector& xi) const override;
  std::optional<double> true_objective(const Vector& xi) const override;
  std::optional<Optimum> optimum() const override { return opt_; }
  std::optional<SmoothnessConstants> constants() const override { return consts_; }

 private:
  std::shared_ptr<const SparseDataset> data_;
  double lambda_;
  SmoothnessConstants consts_;
  std::optional<Optimum> opt_;
};

// F(xi) = (1/N) sum_i (xi.A_i.xi / 2 - b_i.xi) with symmetric A_i.
class FiniteSumQuadratic final : public StochasticProblem {
 public:
  FiniteSumQuadratic(std::vector<Matrix> a, std::vector<Vector> b);

  std::size_t dimension() const override { return static_cast<std::size_t>(b_.front().size()); }
  Population population() const override { return Population::finite(a_.size()); }
  RandomEvent sample_event(RngStream& rng) const override;
  Vector gradient(const Vector& xi, const RandomEvent& e) const override;
  std::optional<double> objective(const Vector& xi, const RandomEvent& e) const override;
  std::optional<Vector> true_gradient(const Vector& xi) const override;
  std::optional<double> true_objective(const Vector& xi) const override;
  std::optional<Optimum> optimum() const override { return opt_; }
  std::optional<SmoothnessConstants> constants() const override { return consts_; }

 private:
  std::vector<Matrix> a_;
  std::vector<Vector> b_;
  Optimum opt_;
  SmoothnessConstants consts_;
};

// Largest eigenvalue of X^T X / N by power iteration.
double gram_spectral_bound(const SparseDataset& data, std::size_t iters = 500);

}  // namespace mice
