#pragma once

#include "mice/config.hpp"
#include "mice/dataset.hpp"
#include "mice/optimizers.hpp"
#include "mice/problems.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mice {

// Flat "key = value" text with optional [section] headers that prefix the
// following keys ("[mice]" then "eps = 1" is the same as "mice.eps = 1").
// '#' starts a comment.
std::map<std::string, std::string> parse_key_values(std::istream& in);

struct ProblemSpec {
  std::string name = "quadratic";  // quadratic, shifted_quadratic, rosenbrock, logistic
  double kappa = 100.0;
  double sigma = 0.1;
  // LibSVM path or "synthetic-mushrooms".
  std::string dataset;
  double lambda = 1e-5;
  LibsvmOptions libsvm;
  std::size_t subsample = 0;  // 0 keeps every row
  std::optional<Vector> start;
};

struct MethodSpec {
  // sgd_mice, adam_mice, sgd_a, idealized, sgd, adam, svrg, sarah, sag, saga
  std::string name = "sgd_mice";
  MiceConfig mice;
  std::optional<double> step;
  std::size_t batch = 10;
  std::optional<double> scale;  // sgd / adam step scale
  double decay = 50.0;          // sgd schedule
};

struct ExperimentConfig {
  ProblemSpec problem;
  MethodSpec method;
  Stopping stop = StoppingRule::max_iterations(1000);
  std::size_t replicates = 1;
  std::uint64_t seed = 1;
  std::string output = "mice_out";
  std::size_t log_stride = 1;
  std::size_t workers = 1;
  bool svg = false;
  bool record_time = true;  // false writes time_s = 0 so outputs are byte-reproducible

  // Throws MiceError(kConfig) on unknown keys or invalid values.
  static ExperimentConfig from_key_values(const std::map<std::string, std::string>& kv);
  static ExperimentConfig from_file(const std::string& path);
  void validate() const;
};

struct ProblemInstance {
  std::unique_ptr<StochasticProblem> problem;
  Vector start;
  std::string note;  // provenance of data and reference optimum
};

// Builds the problem; logistic problems get a reference optimum, read from or
// written to `cache_path` (empty: next to the dataset file).
ProblemInstance make_problem(const ProblemSpec& spec, const std::string& cache_path = "");

RunSummary run_method(const StochasticProblem& problem, const Vector& start,
                      const MethodSpec& method, const RunOptions& opts, RngStream rng);

// High-accuracy minimizer of the full logistic objective (Newton with
// backtracking for moderate dimension, accelerated gradient otherwise).
Optimum logistic_reference_optimum(const LogisticProblem& problem, double grad_tol = 1e-12);

struct ExperimentSummary {
  std::vector<RunSummary> runs;
  std::vector<std::string> files;
};

// Runs all replicates, writes replicate_NNN.csv files, aggregate.csv and,
// when requested, gap.svg into cfg.output.
ExperimentSummary run_experiment(const ExperimentConfig& cfg);

struct AggregateRow {
  std::size_t row = 0;
  std::size_t iter = 0;
  std::size_t replicates = 0;
  double grad_evals_mean = 0.0;
  double opt_gap_mean = 0.0;
  double opt_gap_p01 = 0.0;
  double opt_gap_p99 = 0.0;
};

// Row-aligned mean and bootstrap 1st/99th percentiles of the gap across
// replicates. Deterministic (fixed bootstrap seed).
std::vector<AggregateRow> aggregate_runs(const std::vector<std::vector<RunRecord>>& runs);
void write_aggregate_csv(const std::vector<AggregateRow>& rows, std::ostream& out);
// Reads replicate_*.csv in dir, writes dir/aggregate.csv, returns the rows.
std::vector<AggregateRow> aggregate_dir(const std::string& dir);

// Log-log line chart of gap against gradient evaluations.
std::string render_gap_svg(const std::vector<AggregateRow>& rows, const std::string& title);

}  // namespace mice
