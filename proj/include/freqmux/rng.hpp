#pragma once

#include <cstdint>
#include <limits>

namespace freqmux {

// Counter-based generator: output i of stream s under seed k is a pure
// function mix(key(k, s) + i * golden). Streams split off a parent are
// independent and reproducible regardless of how work is partitioned.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream), key_(mix(seed ^ mix(stream + kStreamSalt))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(key_ + (counter_++) * kGolden); }

  // Independent child stream. Children of the same parent with distinct ids
  // never share outputs with each other or with the parent.
  CounterRng split(std::uint64_t child) const {
    return CounterRng(seed_, mix(stream_ ^ (child * kGolden + 0x5851F42D4C957F2DULL)));
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::uint64_t counter() const { return counter_; }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kStreamSalt = 0xD1B54A32D192ED03ULL;

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace freqmux
