#include "mice/experiment.hpp"
#include "mice/telemetry.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mice;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("mice_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::map<std::string, std::string> quad_kv(const fs::path& out) {
  return {{"problem", "quadratic"},   {"problem.kappa", "100"}, {"method", "sgd_mice"},
          {"mice.eps", "1"},          {"stop.max_iters", "200"}, {"seed", "5"},
          {"output", out.string()},   {"record_time", "false"}};
}

ErrorCode config_code(std::map<std::string, std::string> kv) {
  try {
    ExperimentConfig::from_key_values(kv);
  } catch (const MiceError& e) {
    return e.code();
  }
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST(ConfigText, SectionsAndComments) {
  std::istringstream in("# comment\nseed = 3\n[mice]\neps = 0.5  # inline\nm_min=7\n[stop]\nmax_iters = 9\n");
  const auto kv = parse_key_values(in);
  EXPECT_EQ(kv.at("seed"), "3");
  EXPECT_EQ(kv.at("mice.eps"), "0.5");
  EXPECT_EQ(kv.at("mice.m_min"), "7");
  EXPECT_EQ(kv.at("stop.max_iters"), "9");
}

TEST(ConfigText, Errors) {
  std::istringstream dup("a = 1\na = 2\n");
  EXPECT_THROW(parse_key_values(dup), MiceError);
  std::istringstream no_eq("just words\n");
  EXPECT_THROW(parse_key_values(no_eq), MiceError);
}

TEST(ExperimentConfig, ParsesAndValidates) {
  const auto c = ExperimentConfig::from_key_values(quad_kv("x"));
  EXPECT_EQ(c.problem.kappa, 100.0);
  EXPECT_EQ(c.method.mice.eps, 1.0);
  EXPECT_EQ(c.seed, 5u);
  EXPECT_FALSE(c.record_time);
}

TEST(ExperimentConfig, Rejections) {
  auto kv = quad_kv("x");
  kv["replicates"] = "0";
  EXPECT_EQ(config_code(kv), ErrorCode::kConfig);
  kv = quad_kv("x");
  kv["colour"] = "blue";
  EXPECT_EQ(config_code(kv), ErrorCode::kConfig);
  kv = quad_kv("x");
  kv["method"] = "newton";
  EXPECT_EQ(config_code(kv), ErrorCode::kConfig);
  kv = quad_kv("x");
  kv["mice.eps"] = "-1";
  EXPECT_EQ(config_code(kv), ErrorCode::kConfig);
  kv = quad_kv("x");
  kv["mice.eps"] = "abc";
  EXPECT_EQ(config_code(kv), ErrorCode::kConfig);
  kv = quad_kv("x");
  kv.erase("stop.max_iters");
  EXPECT_EQ(config_code(kv), ErrorCode::kConfig);
  kv = quad_kv("x");
  kv["method"] = "adam_mice";
  EXPECT_EQ(config_code(kv), ErrorCode::kConfig);
  kv = quad_kv("x");
  kv["problem"] = "logistic";
  EXPECT_EQ(config_code(kv), ErrorCode::kConfig);
}

TEST(Experiment, SameSeedByteIdentical) {
  const auto a = fresh_dir("det_a");
  const auto b = fresh_dir("det_b");
  auto kva = quad_kv(a);
  kva["replicates"] = "2";
  auto kvb = quad_kv(b);
  kvb["replicates"] = "2";
  run_experiment(ExperimentConfig::from_key_values(kva));
  run_experiment(ExperimentConfig::from_key_values(kvb));
  for (const char* f : {"replicate_000.csv", "replicate_001.csv", "aggregate.csv"}) {
    const auto sa = slurp(a / f);
    ASSERT_FALSE(sa.empty()) << f;
    EXPECT_EQ(sa, slurp(b / f)) << f;
  }
  EXPECT_NE(slurp(a / "replicate_000.csv"), slurp(a / "replicate_001.csv"));
}

TEST(Experiment, QuadraticGapMostlyNonincreasing) {
  const auto dir = fresh_dir("monotone");
  run_experiment(ExperimentConfig::from_key_values(quad_kv(dir)));
  std::ifstream in(dir / "replicate_000.csv");
  const auto rs = read_run_csv(in);
  std::size_t rows = 0, ok = 0;
  for (std::size_t i = 1; i < rs.size(); ++i) {
    if (rs[i].iter <= 10 || std::isnan(rs[i].opt_gap)) continue;
    ++rows;
    ok += rs[i].opt_gap <= rs[i - 1].opt_gap;
  }
  ASSERT_GT(rows, 100u);
  EXPECT_GE(static_cast<double>(ok) / static_cast<double>(rows), 0.95) << ok << "/" << rows;
}

TEST(Experiment, AggregateRecomputableFromReplicates) {
  const auto dir = fresh_dir("agg");
  auto kv = quad_kv(dir);
  kv["replicates"] = "3";
  run_experiment(ExperimentConfig::from_key_values(kv));
  const auto written = slurp(dir / "aggregate.csv");
  fs::remove(dir / "aggregate.csv");
  const auto rows = aggregate_dir(dir.string());
  EXPECT_EQ(slurp(dir / "aggregate.csv"), written);
  ASSERT_FALSE(rows.empty());
  // Row means equal a direct average of the replicate files.
  std::vector<std::vector<RunRecord>> reps;
  for (const char* f : {"replicate_000.csv", "replicate_001.csv", "replicate_002.csv"}) {
    std::ifstream in(dir / f);
    reps.push_back(read_run_csv(in));
  }
  const std::size_t row = 20;
  double mean = 0.0;
  for (const auto& r : reps) mean += r[row].opt_gap / 3.0;
  EXPECT_NEAR(rows[row].opt_gap_mean, mean, 1e-12 * std::abs(mean));
  EXPECT_LE(rows[row].opt_gap_p01, rows[row].opt_gap_p99);
}

TEST(Experiment, LogisticOnSyntheticSubsample) {
  const auto dir = fresh_dir("logistic");
  std::map<std::string, std::string> kv{{"problem", "logistic"},
                                        {"problem.dataset", "synthetic-mushrooms"},
                                        {"problem.subsample", "500"},
                                        {"method", "svrg"},
                                        {"stop.max_grad_evals", "20000"},
                                        {"output", dir.string()},
                                        {"record_time", "false"}};
  const auto summary = run_experiment(ExperimentConfig::from_key_values(kv));
  ASSERT_EQ(summary.runs.size(), 1u);
  EXPECT_EQ(summary.runs[0].stop_reason, "budget");
  std::ifstream in(dir / "replicate_000.csv");
  const auto rs = read_run_csv(in);
  EXPECT_LT(rs.back().opt_gap, rs.front().opt_gap);
  EXPECT_GE(rs.back().opt_gap, -1e-12);
}

#ifdef MICE_BENCH_EXE
namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + MICE_BENCH_EXE + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST(Cli, ExitCodes) {
  const auto dir = fresh_dir("cli");
  {
    std::ofstream good(dir / "good.cfg");
    good << "problem = quadratic\nmethod = sgd_mice\nstop.max_iters = 20\noutput = "
         << (dir / "out").string() << "\nrecord_time = false\n";
  }
  {
    std::ofstream bad(dir / "bad.cfg");
    bad << "problem = quadratic\nmethod = sgd_mice\nstop.max_iters = 20\nreplicates = 0\n";
  }
  EXPECT_EQ(run_cli("validate " + (dir / "good.cfg").string()), 0);
  EXPECT_EQ(run_cli("validate " + (dir / "bad.cfg").string()), 2);
  EXPECT_EQ(run_cli("run " + (dir / "bad.cfg").string()), 2);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli("run " + (dir / "good.cfg").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "replicate_000.csv"));
  EXPECT_EQ(run_cli("aggregate " + (dir / "out").string()), 0);
  EXPECT_EQ(run_cli("aggregate " + (dir / "nowhere").string()), 3);
  EXPECT_EQ(run_cli("slope " + (dir / "out" / "replicate_000.csv").string() + " --x iter --window 1:15"), 0);
  EXPECT_EQ(run_cli("datasets fetch-info"), 0);
}

TEST(Cli, SeedOverride) {
  const auto dir = fresh_dir("cli_seed");
  {
    std::ofstream cfg(dir / "c.cfg");
    cfg << "problem = quadratic\nmethod = sgd_mice\nstop.max_iters = 30\nrecord_time = false\n"
        << "seed = 1\noutput = " << (dir / "o").string() << "\n";
  }
  const auto csv = dir / "o" / "replicate_000.csv";
  ASSERT_EQ(run_cli("run " + (dir / "c.cfg").string()), 0);
  const auto base = slurp(csv);
  ASSERT_EQ(std::system(("MICE_SEED=1 \"" + std::string(MICE_BENCH_EXE) + "\" run " +
                         (dir / "c.cfg").string() + " >/dev/null 2>&1")
                            .c_str()),
            0);
  EXPECT_EQ(slurp(csv), base);
  ASSERT_EQ(std::system(("MICE_SEED=2 \"" + std::string(MICE_BENCH_EXE) + "\" run " +
                         (dir / "c.cfg").string() + " >/dev/null 2>&1")
                            .c_str()),
            0);
  EXPECT_NE(slurp(csv), base);
}
#endif
