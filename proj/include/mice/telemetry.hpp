#pragma once

#include "mice/optimizers.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace mice {

// Column order of run CSV files.
inline constexpr const char* kRunCsvHeader =
    "iter,grad_evals_cum,time_s,objective,opt_gap,grad_norm_est,stat_err_sq,action,hierarchy_len";

// Streams records as CSV rows; the header is written on construction.
class RunCsvWriter {
 public:
  explicit RunCsvWriter(std::ostream& out);
  void write(const RunRecord& r);
  std::size_t rows() const { return rows_; }

 private:
  std::ostream& out_;
  std::size_t rows_ = 0;
};

std::size_t write_run_csv(std::span<const RunRecord> records, std::ostream& out);

// Numeric columns and action; xi and per-layer data are not stored.
std::vector<RunRecord> read_run_csv(std::istream& in);

}  // namespace mice
