#pragma once

#include "mice/problem.hpp"

// Deterministic linear gradient A xi - b with no randomness.
class DeterministicQuadratic final : public mice::StochasticProblem {
 public:
  DeterministicQuadratic(mice::Matrix a, mice::Vector b) : a_(std::move(a)), b_(std::move(b)) {}

  std::size_t dimension() const override { return static_cast<std::size_t>(b_.size()); }
  mice::Population population() const override { return mice::Population::infinite(); }
  mice::RandomEvent sample_event(mice::RngStream& rng) const override {
    rng();
    return mice::RandomEvent::from_index(0);
  }
  mice::Vector gradient(const mice::Vector& xi, const mice::RandomEvent&) const override {
    return a_ * xi - b_;
  }
  std::optional<mice::Vector> true_gradient(const mice::Vector& xi) const override {
    return a_ * xi - b_;
  }
  std::optional<double> true_objective(const mice::Vector& xi) const override {
    return 0.5 * xi.dot(a_ * xi) - b_.dot(xi);
  }
  std::optional<mice::Optimum> optimum() const override {
    const mice::Vector x = a_.ldlt().solve(b_);
    return mice::Optimum{x, *true_objective(x)};
  }
  std::optional<mice::SmoothnessConstants> constants() const override {
    Eigen::SelfAdjointEigenSolver<mice::Matrix> es(a_);
    return mice::SmoothnessConstants{es.eigenvalues().maxCoeff(), es.eigenvalues().minCoeff(),
                                     es.eigenvalues().maxCoeff()};
  }
  std::optional<mice::Matrix> gradient_covariance(const mice::Vector&) const override {
    return mice::Matrix::Zero(b_.size(), b_.size());
  }

 private:
  mice::Matrix a_;
  mice::Vector b_;
};
