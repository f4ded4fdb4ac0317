#include "mice/dataset.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>
#include <streambuf>

using namespace mice;

namespace {

SparseDataset parse(const std::string& text, const LibsvmOptions& opts = {}) {
  std::istringstream in(text);
  return parse_libsvm(in, opts);
}

ErrorCode parse_code(const std::string& text) {
  try {
    parse(text);
  } catch (const MiceError& e) {
    return e.code();
  }
  return ErrorCode::kInvalidArgument;
}

// Generates LibSVM lines on demand so no full copy of the input ever exists.
class LineGenerator final : public std::streambuf {
 public:
  explicit LineGenerator(std::size_t lines) : remaining_(lines) {}

 protected:
  int_type underflow() override {
    if (remaining_ == 0) return traits_type::eof();
    --remaining_;
    line_ = (remaining_ % 2 ? "1 " : "-1 ") + std::to_string(1 + remaining_ % 7) + ":0.5 9:1\n";
    setg(line_.data(), line_.data(), line_.data() + line_.size());
    return traits_type::to_int_type(line_[0]);
  }

 private:
  std::size_t remaining_;
  std::string line_;
};

SparseDataset small_set() {
  return parse("1 1:1 4:2\n-1 2:0.5\n1 3:1.5 5:-1\n-1 1:0.25 2:0.25\n1 4:3\n");
}

}  // namespace

TEST(Libsvm, SingleRowZeroBased) {
  const auto d = parse("1 3:1 10:1\n");
  ASSERT_EQ(d.rows(), 1u);
  EXPECT_EQ(d.labels[0], 1.0);
  const auto c = d.row_cols(0);
  const auto v = d.row_vals(0);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0], 2u);
  EXPECT_EQ(c[1], 9u);
  EXPECT_EQ(v[0], 1.0);
  EXPECT_EQ(v[1], 1.0);
  EXPECT_EQ(d.n_features, 10u);
}

TEST(Libsvm, TwoRows) {
  const auto d = parse("-1 1:0.5\n-1 2:0.5\n");
  EXPECT_EQ(d.rows(), 2u);
  EXPECT_GE(d.n_features, 2u);
}

TEST(Libsvm, CommentsBlankLinesAndEmptyRows) {
  const auto d = parse("# header\n\n1 2:1 # trailing\n-1\n");
  ASSERT_EQ(d.rows(), 2u);
  EXPECT_EQ(d.row_cols(1).size(), 0u);
}

TEST(Libsvm, Errors) {
  EXPECT_EQ(parse_code("1 5:1 3:1\n"), ErrorCode::kParse);
  EXPECT_EQ(parse_code("1 3:1 3:2\n"), ErrorCode::kParse);
  EXPECT_EQ(parse_code("1 0:1\n"), ErrorCode::kParse);
  EXPECT_EQ(parse_code("x 1:1\n"), ErrorCode::kParse);
  EXPECT_EQ(parse_code("1 1-1\n"), ErrorCode::kParse);
  EXPECT_EQ(parse_code("1 1:abc\n"), ErrorCode::kParse);
  EXPECT_EQ(parse_code(""), ErrorCode::kParse);
  EXPECT_EQ(parse_code("# only\n\n"), ErrorCode::kParse);
}

TEST(Libsvm, ErrorNamesLine) {
  try {
    parse("1 1:1\n-1 2:1\n1 4:1 2:1\n");
    FAIL();
  } catch (const MiceError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Libsvm, LabelMapping) {
  LibsvmOptions zero_one;
  zero_one.zero_one_labels = true;
  EXPECT_EQ(parse("0 1:1\n1 1:1\n", zero_one).labels, (std::vector<double>{-1.0, 1.0}));
  LibsvmOptions table;
  table.label_map = {{1.0, -1.0}, {2.0, 1.0}};
  EXPECT_EQ(parse("1 1:1\n2 1:1\n", table).labels, (std::vector<double>{-1.0, 1.0}));
  LibsvmOptions wide;
  wide.min_features = 50;
  EXPECT_EQ(parse("1 1:1\n", wide).n_features, 50u);
}

TEST(Libsvm, RoundTripIsIdempotent) {
  const auto d = parse("1 1:0.1 4:2.5e-7\n-1 2:0.3333333333333333\n1 7:-1\n");
  std::ostringstream once;
  write_libsvm(once, d);
  const auto d2 = parse(once.str());
  std::ostringstream twice;
  write_libsvm(twice, d2);
  EXPECT_EQ(once.str(), twice.str());
  EXPECT_EQ(d2.vals, d.vals);
  EXPECT_EQ(d2.cols, d.cols);
  EXPECT_EQ(d2.labels, d.labels);
}

TEST(Libsvm, StreamsMillionLines) {
  LineGenerator gen(1000000);
  std::istream in(&gen);
  const auto d = parse_libsvm(in);
  EXPECT_EQ(d.rows(), 1000000u);
  EXPECT_EQ(d.n_features, 9u);
  EXPECT_EQ(d.cols.size(), 2000000u);
}

TEST(Subsample, FullSizeIsPermutation) {
  const auto d = small_set();
  RngStream rng(3);
  const auto s = subsample(d, d.rows(), rng);
  ASSERT_EQ(s.rows(), d.rows());
  EXPECT_EQ(s.n_features, d.n_features);
  auto key = [](const SparseDataset& x, std::size_t i) {
    std::ostringstream o;
    o << x.labels[i];
    for (auto c : x.row_cols(i)) o << ' ' << c;
    for (auto v : x.row_vals(i)) o << ' ' << v;
    return o.str();
  };
  std::multiset<std::string> a, b;
  for (std::size_t i = 0; i < d.rows(); ++i) {
    a.insert(key(d, i));
    b.insert(key(s, i));
  }
  EXPECT_EQ(a, b);
}

TEST(Subsample, DeterministicAndDistinct) {
  const auto d = synthetic_mushrooms(1, 500);
  RngStream r1(9), r2(9);
  const auto a = subsample(d, 100, r1);
  const auto b = subsample(d, 100, r2);
  EXPECT_EQ(a.cols, b.cols);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.rows(), 100u);
}

TEST(Subsample, Bounds) {
  const auto d = small_set();
  RngStream rng(1);
  EXPECT_EQ(subsample(d, 0, rng).rows(), 0u);
  EXPECT_THROW(subsample(d, d.rows() + 1, rng), MiceError);
}

TEST(SyntheticMushrooms, Shape) {
  const auto d = synthetic_mushrooms(2024);
  EXPECT_EQ(d.rows(), 8124u);
  EXPECT_EQ(d.n_features, 112u);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < d.rows(); ++i) {
    ASSERT_EQ(d.row_cols(i).size(), 22u);
    for (double v : d.row_vals(i)) ASSERT_EQ(v, 1.0);
    ASSERT_TRUE(d.labels[i] == 1.0 || d.labels[i] == -1.0);
    pos += d.labels[i] > 0;
  }
  // Both classes present in reasonable proportion.
  EXPECT_GT(pos, 8124u / 5);
  EXPECT_LT(pos, 8124u * 4 / 5);
  const auto again = synthetic_mushrooms(2024);
  EXPECT_EQ(again.cols, d.cols);
  EXPECT_EQ(again.labels, d.labels);
}

TEST(SparseDataset, RowOperations) {
  const auto d = small_set();
  const Vector x{{1.0, 2.0, 3.0, 4.0, 5.0}};
  EXPECT_DOUBLE_EQ(d.dot(0, x), 1.0 + 8.0);
  EXPECT_DOUBLE_EQ(d.row_norm_sq(2), 1.5 * 1.5 + 1.0);
  Vector out = Vector::Zero(5);
  d.axpy(3, 2.0, out);
  EXPECT_EQ(out, (Vector{{0.5, 0.5, 0.0, 0.0, 0.0}}));
}
