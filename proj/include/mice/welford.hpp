#pragma once

#include "mice/common.hpp"

#include <cstddef>

namespace mice {

// Online mean and total (component-summed) second central moment of a
// stream of vectors.
struct WelfordAgg {
  std::size_t count = 0;
  Vector mean;
  double m2_total = 0.0;

  WelfordAgg() = default;
  explicit WelfordAgg(Eigen::Index dim) : mean(Vector::Zero(dim)) {}

  Eigen::Index dimension() const { return mean.size(); }

  void add(const Vector& sample);

  // m2_total / (count - 1); zero below two samples.
  double sample_variance_total() const {
    return count < 2 ? 0.0 : m2_total / static_cast<double>(count - 1);
  }
};

WelfordAgg welford_update(WelfordAgg agg, const Vector& sample);

// Aggregate of the concatenated streams (parallel-variance rule).
WelfordAgg welford_merge(const WelfordAgg& a, const WelfordAgg& b);

}  // namespace mice
