#pragma once

#include <cstdint>
#include <limits>

namespace mice {

// Counter-based random stream. Draw number i of stream (seed, id) is a pure
// function of (seed, id, i), so independent streams for layers, workers or
// replicates can be derived without generating any prefix of another stream.
//
//   key_lo = mix(seed ^ mix(id + kStreamSalt))
//   key_hi = mix(key_lo ^ kHiSalt)
//   draw_i = mix(mix(key_lo + i * kGolden) ^ key_hi)
//
// where mix is the SplitMix64 finalizer. Distributions are implemented here
// (not via <random>) so sequences match across standard libraries.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed = 0, std::uint64_t stream_id = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Standard normal (Box-Muller, second variate cached).
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  // Uniform integer in [0, n); n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);

  // Independent child stream; deterministic in (seed, id, child).
  RngStream derive(std::uint64_t child) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t counter() const { return counter_; }

  static std::uint64_t mix(std::uint64_t x);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_lo_;
  std::uint64_t key_hi_;
  std::uint64_t counter_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace mice
