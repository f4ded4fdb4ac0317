#include "mice/telemetry.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace mice {

namespace {

void put_double(std::ostream& out, double v) {
  if (std::isnan(v)) {
    out << "nan";
    return;
  }
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.write(buf, ptr - buf);
}

double get_double(const std::string& s) {
  if (s == "nan" || s.empty()) return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw MiceError(ErrorCode::kParse, "bad number '" + s + "' in run CSV");
  }
  return v;
}

template <class T>
T get_uint(const std::string& s) {
  T v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw MiceError(ErrorCode::kParse, "bad integer '" + s + "' in run CSV");
  }
  return v;
}

}  // namespace

RunCsvWriter::RunCsvWriter(std::ostream& out) : out_(out) {
  out_ << kRunCsvHeader << '\n';
  if (!out_) throw MiceError(ErrorCode::kIo, "failed to write run CSV header");
}

void RunCsvWriter::write(const RunRecord& r) {
  out_ << r.iter << ',' << r.grad_evals_cum << ',';
  put_double(out_, r.time_s);
  out_ << ',';
  put_double(out_, r.objective);
  out_ << ',';
  put_double(out_, r.opt_gap);
  out_ << ',';
  put_double(out_, r.grad_norm_est);
  out_ << ',';
  put_double(out_, r.stat_err_sq);
  out_ << ',' << r.action << ',' << r.hierarchy_len << '\n';
  if (!out_) throw MiceError(ErrorCode::kIo, "failed to write run CSV row");
  ++rows_;
}

std::size_t write_run_csv(std::span<const RunRecord> records, std::ostream& out) {
  RunCsvWriter w(out);
  for (const auto& r : records) w.write(r);
  return w.rows();
}

std::vector<RunRecord> read_run_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kRunCsvHeader) {
    throw MiceError(ErrorCode::kParse, "run CSV: missing or unexpected header");
  }
  std::vector<RunRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 9) {
      throw MiceError(ErrorCode::kParse,
                      "run CSV line " + std::to_string(line_no) + ": expected 9 fields");
    }
    RunRecord r;
    r.iter = get_uint<std::size_t>(f[0]);
    r.grad_evals_cum = get_uint<std::uint64_t>(f[1]);
    r.time_s = get_double(f[2]);
    r.objective = get_double(f[3]);
    r.opt_gap = get_double(f[4]);
    r.grad_norm_est = get_double(f[5]);
    r.stat_err_sq = get_double(f[6]);
    r.action = f[7];
    r.hierarchy_len = get_uint<std::size_t>(f[8]);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace mice
