#include "mice/telemetry.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

using namespace mice;

namespace {

RunRecord record(std::size_t k, double gap) {
  RunRecord r;
  r.iter = k;
  r.grad_evals_cum = 50 + 13 * k;
  r.time_s = 1e-3 * std::sqrt(static_cast<double>(k) + 0.1);
  r.objective = 1.0 / 3.0 + gap;
  r.opt_gap = gap;
  r.grad_norm_est = std::exp(-0.7 * static_cast<double>(k)) * 123.456789;
  r.stat_err_sq = 0.1 * gap;
  r.action = k == 0 ? "restart" : "step";
  r.hierarchy_len = k + 1;
  return r;
}

bool same_number(double a, double b, double tol) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

}  // namespace

TEST(RunCsv, EmptyStreamHeaderOnly) {
  std::ostringstream out;
  EXPECT_EQ(write_run_csv({}, out), 0u);
  EXPECT_EQ(out.str(), std::string(kRunCsvHeader) + "\n");
}

TEST(RunCsv, ColumnOrder) {
  EXPECT_STREQ(kRunCsvHeader,
               "iter,grad_evals_cum,time_s,objective,opt_gap,grad_norm_est,stat_err_sq,action,"
               "hierarchy_len");
}

TEST(RunCsv, ThreeRecordsThreeRows) {
  std::vector<RunRecord> rs{record(0, 1.0), record(1, 0.5), record(2, 0.25)};
  std::ostringstream out;
  EXPECT_EQ(write_run_csv(rs, out), 3u);
  std::istringstream in(out.str());
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 4u);
}

TEST(RunCsv, RoundTrip) {
  std::vector<RunRecord> rs;
  for (std::size_t k = 0; k < 25; ++k) rs.push_back(record(k, std::pow(0.37, k) * 7.77));
  rs[3].opt_gap = std::numeric_limits<double>::quiet_NaN();
  rs[4].objective = std::numeric_limits<double>::infinity();
  rs.back().action = "end";
  rs.back().grad_norm_est = std::numeric_limits<double>::quiet_NaN();
  std::ostringstream out;
  write_run_csv(rs, out);
  std::istringstream in(out.str());
  const auto back = read_run_csv(in);
  ASSERT_EQ(back.size(), rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    EXPECT_EQ(back[i].iter, rs[i].iter);
    EXPECT_EQ(back[i].grad_evals_cum, rs[i].grad_evals_cum);
    EXPECT_TRUE(same_number(back[i].time_s, rs[i].time_s, 1e-15));
    EXPECT_TRUE(back[i].objective == rs[i].objective ||
                same_number(back[i].objective, rs[i].objective, 1e-15));
    EXPECT_TRUE(same_number(back[i].opt_gap, rs[i].opt_gap, 1e-15));
    EXPECT_TRUE(same_number(back[i].grad_norm_est, rs[i].grad_norm_est, 1e-15));
    EXPECT_TRUE(same_number(back[i].stat_err_sq, rs[i].stat_err_sq, 1e-15));
    EXPECT_EQ(back[i].action, rs[i].action);
    EXPECT_EQ(back[i].hierarchy_len, rs[i].hierarchy_len);
  }
}

TEST(RunCsv, RejectsMalformed) {
  std::istringstream no_header("1,2,3\n");
  EXPECT_THROW(read_run_csv(no_header), MiceError);
  std::istringstream short_row(std::string(kRunCsvHeader) + "\n1,2,3\n");
  EXPECT_THROW(read_run_csv(short_row), MiceError);
  std::istringstream bad_num(std::string(kRunCsvHeader) + "\n1,2,x,0,0,0,0,step,1\n");
  EXPECT_THROW(read_run_csv(bad_num), MiceError);
}
