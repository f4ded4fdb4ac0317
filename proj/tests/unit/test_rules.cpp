#include "mice/rng.hpp"
#include "mice/rules.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

using namespace mice;

namespace {

const Population kInf = Population::infinite();
const SampleBounds kUnit{1, 10'000'000};

std::vector<std::size_t> sizes(std::vector<LayerLoad> layers, double tol,
                               const SampleBounds& b = kUnit, const Population& pop = kInf) {
  return optimal_sample_sizes(layers, tol, b, pop);
}

// Cheapest integer allocation with sum V/M <= tol, by exhaustive search.
double exhaustive_cost(const std::vector<LayerLoad>& layers, double tol, double upper) {
  double best = std::numeric_limits<double>::infinity();
  const double slack = 1e-12 * tol;
  std::function<void(std::size_t, double, double)> rec = [&](std::size_t i, double used,
                                                             double cost) {
    if (i == layers.size()) {
      if (used <= tol + slack) best = std::min(best, cost);
      return;
    }
    for (double m = 1;; m += 1) {
      const double c = cost + layers[i].cost_weight * m;
      if (c > upper || c >= best) break;
      rec(i + 1, used + layers[i].variance / m, c);
    }
  };
  rec(0, 0.0, 0.0);
  return best;
}

}  // namespace

TEST(StatErrorSq, Examples) {
  EXPECT_EQ(stat_error_sq(std::vector<LayerLoad>{{4, 1, 2, false}}, kInf).value, 2.0);
  EXPECT_EQ(stat_error_sq(std::vector<LayerLoad>{{4, 1, 4, false}, {1, 2, 1, false}}, kInf).value,
            2.0);
  EXPECT_EQ(stat_error_sq(std::vector<LayerLoad>{{4, 1, 100, false}}, Population::finite(100)).value,
            0.0);
}

TEST(StatErrorSq, FiniteCorrectionAndFrozen) {
  const auto e = stat_error_sq(std::vector<LayerLoad>{{4, 1, 10, false}, {7, 1, 0, true}},
                               Population::finite(101));
  EXPECT_DOUBLE_EQ(e.value, 0.4 * 91.0 / 100.0);
  EXPECT_FALSE(e.warmup);
}

TEST(StatErrorSq, WarmupFlag) {
  EXPECT_TRUE(stat_error_sq(std::vector<LayerLoad>{{4, 1, 1, false}}, kInf).warmup);
  EXPECT_FALSE(stat_error_sq(std::vector<LayerLoad>{{4, 1, 2, false}}, kInf).warmup);
}

TEST(OptimalSampleSizes, Examples) {
  EXPECT_EQ(sizes({{4, 1, 0, false}}, 1.0), std::vector<std::size_t>{4});
  EXPECT_EQ(sizes({{9, 1, 0, false}, {1, 2, 0, false}}, 1.0), (std::vector<std::size_t>{14, 4}));
  EXPECT_EQ(sizes({{4, 1, 0, false}}, 0.0, kUnit, Population::finite(100)),
            std::vector<std::size_t>{100});
}

TEST(OptimalSampleSizes, ClosedFormTwoLayerValues) {
  // Direct evaluation of the formula for the base + difference example.
  const double s = 3.0 + std::sqrt(2.0);
  EXPECT_EQ(static_cast<std::size_t>(std::ceil(s * 3.0)), 14u);
  EXPECT_EQ(static_cast<std::size_t>(std::ceil(s / std::sqrt(2.0))), 4u);
}

TEST(OptimalSampleSizes, Clamps) {
  // m_min floor, current M floor, max cap, frozen layers excluded.
  EXPECT_EQ(sizes({{0.1, 1, 0, false}}, 1.0, {5, 1000}), std::vector<std::size_t>{5});
  EXPECT_EQ(sizes({{4, 1, 30, false}}, 1.0), std::vector<std::size_t>{30});
  EXPECT_EQ(sizes({{1e9, 1, 0, false}}, 1.0, {1, 1000}), std::vector<std::size_t>{1000});
  EXPECT_EQ(sizes({{3, 1, 0, true}, {4, 2, 0, false}}, 1.0),
            (std::vector<std::size_t>{0, 4}));
  EXPECT_EQ(sizes({{1e9, 1, 0, false}}, 1.0, kUnit, Population::finite(50)),
            std::vector<std::size_t>{50});
}

TEST(OptimalSampleSizes, FiniteFormula) {
  // N/(N-1) * sqrt(V w) sqrt(V/w) / (tol + V/(N-1)) for one base layer.
  const double n = 1000, v = 50, tol = 0.1;
  const double ideal = n / (n - 1) * v / (tol + v / (n - 1));
  EXPECT_EQ(sizes({{v, 1, 0, false}}, tol, kUnit, Population::finite(1000)),
            std::vector<std::size_t>{static_cast<std::size_t>(std::ceil(ideal))});
}

TEST(OptimalSampleSizes, FiniteTargetsMeetTolerance) {
  RngStream rng(9);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 10 + rng.uniform_index(500);
    std::vector<LayerLoad> layers = {{0.5 + 10 * rng.uniform(), 1, 0, false},
                                     {0.1 + rng.uniform(), 2, 0, false}};
    const double tol = 0.01 + rng.uniform();
    const auto pop = Population::finite(n);
    const auto m = sizes(layers, tol, kUnit, pop);
    for (std::size_t l = 0; l < 2; ++l) layers[l].samples = m[l];
    EXPECT_LE(stat_error_sq(layers, pop).value, tol * (1 + 1e-12));
  }
}

TEST(OptimalSampleSizes, WithinOneUnitPerLayerOfExhaustiveOptimum) {
  RngStream rng(10);
  const double tols[] = {0.25, 1.0, 4.0};
  for (int inst = 0; inst < 100; ++inst) {
    const std::size_t n = 1 + rng.uniform_index(3);
    std::vector<LayerLoad> layers(n);
    double units = 0;
    for (std::size_t i = 0; i < n; ++i) {
      layers[i] = {0.5 + 9.5 * rng.uniform(), i == 0 ? 1.0 : 2.0, 0, false};
      units += layers[i].cost_weight;
    }
    const double tol = tols[rng.uniform_index(3)];
    const auto m = sizes(layers, tol);
    double err = 0, cost = 0;
    for (std::size_t i = 0; i < n; ++i) {
      err += layers[i].variance / static_cast<double>(m[i]);
      cost += layers[i].cost_weight * static_cast<double>(m[i]);
    }
    EXPECT_LE(err, tol * (1 + 1e-12));
    const double best = exhaustive_cost(layers, tol, cost);
    EXPECT_LE(best, cost);
    EXPECT_LE(cost - best, units);
  }
}

TEST(IncrementalWork, Examples) {
  const std::vector<LayerLoad> base = {{1, 1, 0, false}};
  const std::vector<LayerLoad> diff = {{1, 2, 0, false}};
  EXPECT_EQ(incremental_work(base, std::vector<std::size_t>{5}, std::vector<std::size_t>{15}, 0),
            10.0);
  EXPECT_EQ(incremental_work(diff, std::vector<std::size_t>{5}, std::vector<std::size_t>{15}, 0),
            20.0);
  const std::vector<LayerLoad> two = {{1, 1, 5, false}, {1, 2, 5, false}};
  EXPECT_EQ(incremental_work(two, std::vector<std::size_t>{5, 5}, std::vector<std::size_t>{5, 5},
                             0.5),
            1.0);
}

TEST(ShouldDrop, TruthTable) {
  EXPECT_TRUE(should_drop(4, 1, 1, 0.5));
  EXPECT_FALSE(should_drop(9, 1, 1, 0.5));
  EXPECT_TRUE(should_drop(4, 1, 1, 0.0));
  EXPECT_TRUE(should_drop(0, 0, 0, 0.5));
  EXPECT_TRUE(should_drop(3, 0, 0, 0.0));
}

TEST(RestartCost, TruthTable) {
  EXPECT_EQ(restart_cost(100, 1, 50), 100.0);
  EXPECT_EQ(restart_cost(0, 1, 50), 50.0);
  EXPECT_EQ(restart_cost(10, 4, 50), 50.0);
  EXPECT_EQ(restart_cost(10, 4, 1), 3.0);
}

TEST(ShouldRestart, TruthTable) {
  EXPECT_TRUE(should_restart(100, 200, 0.0));
  EXPECT_FALSE(should_restart(300, 200, 0.3));
  EXPECT_TRUE(should_restart(260, 200, 0.3));
}

TEST(Resampling, CountAndRank) {
  EXPECT_EQ(resample_count(1.0, 1000, 1.0, 10, 10, 10000), 100u);
  EXPECT_EQ(resample_count(1.0, 10, 1.0, 10, 10, 10000), 10u);
  EXPECT_EQ(resample_count(1.0, 1e12, 1.0, 1, 10, 10000), 10000u);
  EXPECT_EQ(percentile_rank(10, 5), 1u);
  EXPECT_EQ(percentile_rank(100, 5), 5u);
  EXPECT_EQ(percentile_rank(1000, 5), 50u);
}
