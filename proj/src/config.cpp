#include "mice/config.hpp"

#include "mice/common.hpp"

#include <cmath>

namespace mice {

const char* to_string(Clipping c) {
  switch (c) {
    case Clipping::kNone: return "none";
    case Clipping::kA: return "A";
    case Clipping::kB: return "B";
  }
  return "?";
}

Clipping parse_clipping(const std::string& s) {
  if (s == "none" || s == "NONE") return Clipping::kNone;
  if (s == "A" || s == "a") return Clipping::kA;
  if (s == "B" || s == "b") return Clipping::kB;
  throw MiceError(ErrorCode::kConfig, "unknown clipping mode '" + s + "'");
}

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::kInvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::kZeroNorm: return "ZERO_NORM";
    case ErrorCode::kEmptyLayer: return "EMPTY_LAYER";
    case ErrorCode::kParse: return "PARSE";
    case ErrorCode::kConfig: return "CONFIG";
    case ErrorCode::kNonFinite: return "NON_FINITE";
    case ErrorCode::kIo: return "IO";
  }
  return "?";
}

namespace {
void check(bool ok, const char* what) {
  if (!ok) throw MiceError(ErrorCode::kConfig, std::string("MiceConfig: ") + what);
}
}  // namespace

void MiceConfig::validate() const {
  check(std::isfinite(eps) && eps > 0.0, "eps must be positive");
  check(delta_drop >= 0.0, "delta_drop must be >= 0");
  check(delta_rest >= 0.0, "delta_rest must be >= 0");
  check(delta_re >= 0.0, "delta_re must be >= 0");
  check(n_part >= 2, "n_part must be >= 2");
  check(p_re > 0.0 && p_re < 100.0, "p_re must lie in (0, 100)");
  check(min_resample >= 1, "min_resample must be >= 1");
  check(max_resample >= min_resample, "max_resample must be >= min_resample");
  check(m_min >= 1, "m_min must be >= 1");
  check(m_min_restart >= 1, "m_min_restart must be >= 1");
  // Every populated layer must fill all jackknife partitions.
  check(m_min >= n_part, "m_min must be >= n_part");
  check(m_min_restart >= n_part, "m_min_restart must be >= n_part");
  check(max_hierarchy_size >= 1, "max_hierarchy_size must be >= 1");
  check(max_layer_samples >= m_min_restart, "max_layer_samples must be >= m_min_restart");
  check(cost_ratio_samp > 0.0, "cost_ratio_samp must be positive");
  check(cost_aggr >= 0.0, "cost_aggr must be >= 0");
  check(norm_floor > 0.0, "norm_floor must be positive");
}

}  // namespace mice
