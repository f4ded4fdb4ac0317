#pragma once

#include "mice/common.hpp"
#include "mice/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace mice {

// Binary-labelled sparse rows in CSR layout, 0-based feature indices.
struct SparseDataset {
  std::size_t n_features = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::uint32_t> cols;
  std::vector<double> vals;
  std::vector<double> labels;

  std::size_t rows() const { return labels.size(); }
  std::span<const std::uint32_t> row_cols(std::size_t i) const {
    return {cols.data() + row_ptr[i], row_ptr[i + 1] - row_ptr[i]};
  }
  std::span<const double> row_vals(std::size_t i) const {
    return {vals.data() + row_ptr[i], row_ptr[i + 1] - row_ptr[i]};
  }

  // Appends a row; indices must be strictly increasing.
  void add_row(double label, std::span<const std::uint32_t> idx, std::span<const double> val);
  double dot(std::size_t i, const Vector& xi) const;
  // out += scale * x_i
  void axpy(std::size_t i, double scale, Vector& out) const;
  double row_norm_sq(std::size_t i) const;
};

struct LibsvmOptions {
  // Applied to raw labels before validation, e.g. {1 -> -1, 2 -> +1}.
  std::map<double, double> label_map;
  // Map label 0 to -1 (for 0/1 files).
  bool zero_one_labels = false;
  // Lower bound on the feature count (files may not mention the last feature).
  std::size_t min_features = 0;
};

// Reads "label idx:val idx:val ..." lines with 1-based strictly increasing
// indices. Blank lines and '#' comments are skipped. Errors carry the line
// number (ErrorCode::kParse).
SparseDataset parse_libsvm(std::istream& in, const LibsvmOptions& opts = {});
SparseDataset read_libsvm_file(const std::string& path, const LibsvmOptions& opts = {});
void write_libsvm(std::ostream& out, const SparseDataset& data);

// n rows drawn uniformly without replacement, kept in draw order.
SparseDataset subsample(const SparseDataset& data, std::size_t n, RngStream& rng);

// One-hot encoded categorical data with the shape of the mushrooms set
// (8124 rows, 22 attributes, 112 binary features) and labels from a latent
// logistic model. Stands in when the real file is unavailable.
SparseDataset synthetic_mushrooms(std::uint64_t seed, std::size_t rows = 8124);

}  // namespace mice
