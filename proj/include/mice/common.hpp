#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace mice {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ErrorCode {
  kDimensionMismatch,
  kInvalidArgument,
  kZeroNorm,
  kEmptyLayer,
  kParse,
  kConfig,
  kNonFinite,
  kIo,
};

const char* to_string(ErrorCode code);

// Single exception type for the library; the code says which contract failed.
class MiceError : public std::runtime_error {
 public:
  MiceError(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Sampling population of a stochastic problem. `size` is empty for an
// infinite population (continuous random input).
struct Population {
  std::optional<std::size_t> size;

  static Population infinite() { return {}; }
  static Population finite(std::size_t n) { return {n}; }

  bool is_finite() const { return size.has_value(); }
};

inline void require_same_dim(Eigen::Index a, Eigen::Index b, const char* where) {
  if (a != b) {
    throw MiceError(ErrorCode::kDimensionMismatch,
                    std::string(where) + ": dimension mismatch (" + std::to_string(a) +
                        " vs " + std::to_string(b) + ")");
  }
}

}  // namespace mice
