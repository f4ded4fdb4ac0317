#include "mice/rng.hpp"

#include "mice/common.hpp"

#include <cmath>

namespace mice {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kStreamSalt = 0xD1B54A32D192ED03ULL;
constexpr std::uint64_t kHiSalt = 0x8CB92BA72F3D8DD7ULL;
constexpr double kTwoPi = 6.283185307179586476925286766559;
}  // namespace

std::uint64_t RngStream::mix(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed),
      stream_id_(stream_id),
      key_lo_(mix(seed ^ mix(stream_id + kStreamSalt))),
      key_hi_(mix(key_lo_ ^ kHiSalt)) {}

RngStream::result_type RngStream::operator()() {
  const std::uint64_t x = key_lo_ + counter_ * kGolden;
  ++counter_;
  return mix(mix(x) ^ key_hi_);
}

double RngStream::uniform() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  // 1 - u lies in (0, 1], keeping the log finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  cached_normal_ = r * std::sin(kTwoPi * u2);
  has_cached_normal_ = true;
  return r * std::cos(kTwoPi * u2);
}

std::uint64_t RngStream::uniform_index(std::uint64_t n) {
  if (n == 0) {
    throw MiceError(ErrorCode::kInvalidArgument, "uniform_index: empty range");
  }
  // Lemire's multiply-shift with rejection of the biased low region.
  std::uint64_t x = (*this)();
  __uint128_t m = static_cast<__uint128_t>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      x = (*this)();
      m = static_cast<__uint128_t>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

RngStream RngStream::derive(std::uint64_t child) const {
  return RngStream(mix(seed_ ^ kGolden) + stream_id_, child);
}

}  // namespace mice
