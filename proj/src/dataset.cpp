#include "mice/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <unordered_set>

namespace mice {

void SparseDataset::add_row(double label, std::span<const std::uint32_t> idx,
                            std::span<const double> val) {
  require_same_dim(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(val.size()),
                   "add_row");
  for (std::size_t j = 0; j < idx.size(); ++j) {
    if (j > 0 && idx[j] <= idx[j - 1]) {
      throw MiceError(ErrorCode::kInvalidArgument, "add_row: indices not strictly increasing");
    }
    n_features = std::max<std::size_t>(n_features, idx[j] + 1);
  }
  cols.insert(cols.end(), idx.begin(), idx.end());
  vals.insert(vals.end(), val.begin(), val.end());
  row_ptr.push_back(cols.size());
  labels.push_back(label);
}

double SparseDataset::dot(std::size_t i, const Vector& xi) const {
  double s = 0.0;
  for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) s += vals[p] * xi[cols[p]];
  return s;
}

void SparseDataset::axpy(std::size_t i, double scale, Vector& out) const {
  for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) out[cols[p]] += scale * vals[p];
}

double SparseDataset::row_norm_sq(std::size_t i) const {
  double s = 0.0;
  for (std::size_t p = row_ptr[i]; p < row_ptr[i + 1]; ++p) s += vals[p] * vals[p];
  return s;
}

namespace {

[[noreturn]] void parse_error(std::size_t line, const std::string& reason) {
  throw MiceError(ErrorCode::kParse, "line " + std::to_string(line) + ": " + reason);
}

bool parse_double(std::string_view s, double& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

SparseDataset parse_libsvm(std::istream& in, const LibsvmOptions& opts) {
  SparseDataset data;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::uint32_t> idx;
  std::vector<double> val;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view rest(line);
    if (auto hash = rest.find('#'); hash != std::string_view::npos) rest = rest.substr(0, hash);
    auto next_token = [&rest]() -> std::string_view {
      const auto b = rest.find_first_not_of(" \t\r");
      if (b == std::string_view::npos) {
        rest = {};
        return {};
      }
      rest.remove_prefix(b);
      const auto e = rest.find_first_of(" \t\r");
      std::string_view tok = rest.substr(0, e);
      rest.remove_prefix(e == std::string_view::npos ? rest.size() : e);
      return tok;
    };

    std::string_view tok = next_token();
    if (tok.empty()) continue;
    double label = 0.0;
    if (!parse_double(tok, label)) parse_error(line_no, "bad label '" + std::string(tok) + "'");
    if (auto it = opts.label_map.find(label); it != opts.label_map.end()) label = it->second;
    if (opts.zero_one_labels && label == 0.0) label = -1.0;

    idx.clear();
    val.clear();
    for (tok = next_token(); !tok.empty(); tok = next_token()) {
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) {
        parse_error(line_no, "expected idx:val, got '" + std::string(tok) + "'");
      }
      std::uint64_t one_based = 0;
      const auto ks = tok.substr(0, colon);
      auto [p, ec] = std::from_chars(ks.data(), ks.data() + ks.size(), one_based);
      if (ec != std::errc() || p != ks.data() + ks.size() || one_based == 0 ||
          one_based > UINT32_MAX) {
        parse_error(line_no, "bad feature index '" + std::string(ks) + "'");
      }
      double v = 0.0;
      if (!parse_double(tok.substr(colon + 1), v) || !std::isfinite(v)) {
        parse_error(line_no, "bad feature value in '" + std::string(tok) + "'");
      }
      const auto zero_based = static_cast<std::uint32_t>(one_based - 1);
      if (!idx.empty() && zero_based <= idx.back()) {
        parse_error(line_no, "feature indices not strictly increasing");
      }
      idx.push_back(zero_based);
      val.push_back(v);
    }
    data.add_row(label, idx, val);
  }
  if (data.rows() == 0) throw MiceError(ErrorCode::kParse, "empty input");
  data.n_features = std::max(data.n_features, opts.min_features);
  return data;
}

SparseDataset read_libsvm_file(const std::string& path, const LibsvmOptions& opts) {
  std::ifstream in(path);
  if (!in) throw MiceError(ErrorCode::kIo, "cannot open " + path);
  try {
    return parse_libsvm(in, opts);
  } catch (const MiceError& e) {
    throw MiceError(e.code(), path + ": " + e.what());
  }
}

void write_libsvm(std::ostream& out, const SparseDataset& data) {
  const auto old = out.precision(17);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    out << data.labels[i];
    const auto c = data.row_cols(i);
    const auto v = data.row_vals(i);
    for (std::size_t j = 0; j < c.size(); ++j) out << ' ' << (c[j] + 1) << ':' << v[j];
    out << '\n';
  }
  out.precision(old);
}

SparseDataset subsample(const SparseDataset& data, std::size_t n, RngStream& rng) {
  if (n > data.rows()) {
    throw MiceError(ErrorCode::kInvalidArgument,
                    "subsample: n=" + std::to_string(n) + " exceeds N=" +
                        std::to_string(data.rows()));
  }
  std::vector<std::size_t> perm(data.rows());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  SparseDataset out;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t pick = j + rng.uniform_index(perm.size() - j);
    std::swap(perm[j], perm[pick]);
    const std::size_t i = perm[j];
    out.add_row(data.labels[i], data.row_cols(i), data.row_vals(i));
  }
  out.n_features = data.n_features;
  return out;
}

SparseDataset synthetic_mushrooms(std::uint64_t seed, std::size_t rows) {
  // Category counts per attribute, 112 in total.
  static constexpr std::size_t kLevels[] = {6, 4, 8, 2, 9, 2, 2, 2, 10, 2, 5,
                                            4, 4, 9, 9, 1, 4, 3, 5, 9, 6, 6};
  RngStream rng(seed, 0x6d757368);
  std::vector<std::vector<double>> cdf;
  std::vector<std::vector<double>> weight;
  for (std::size_t levels : kLevels) {
    std::vector<double> p(levels);
    std::vector<double> w(levels);
    double total = 0.0;
    for (std::size_t j = 0; j < levels; ++j) {
      p[j] = -std::log(1.0 - rng.uniform());
      total += p[j];
      w[j] = 1.5 * rng.normal();
    }
    // Center weights so the latent score has mean zero and classes balance.
    double mean_w = 0.0;
    for (std::size_t j = 0; j < levels; ++j) mean_w += p[j] / total * w[j];
    for (auto& x : w) x -= mean_w;
    double acc = 0.0;
    for (auto& x : p) {
      acc += x / total;
      x = acc;
    }
    cdf.push_back(std::move(p));
    weight.push_back(std::move(w));
  }

  SparseDataset data;
  std::vector<std::uint32_t> idx;
  std::vector<double> val(std::size(kLevels), 1.0);
  for (std::size_t r = 0; r < rows; ++r) {
    idx.clear();
    double score = 0.0;
    std::uint32_t offset = 0;
    for (std::size_t a = 0; a < std::size(kLevels); ++a) {
      const double u = rng.uniform();
      const auto it = std::lower_bound(cdf[a].begin(), cdf[a].end(), u);
      const auto j = static_cast<std::size_t>(
          std::min<std::ptrdiff_t>(it - cdf[a].begin(), static_cast<std::ptrdiff_t>(kLevels[a]) - 1));
      idx.push_back(offset + static_cast<std::uint32_t>(j));
      score += weight[a][j];
      offset += static_cast<std::uint32_t>(kLevels[a]);
    }
    const double p_pos = 1.0 / (1.0 + std::exp(-score));
    data.add_row(rng.uniform() < p_pos ? 1.0 : -1.0, idx, val);
  }
  data.n_features = 112;
  return data;
}

}  // namespace mice
