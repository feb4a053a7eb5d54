#pragma once

#include <cstdint>
#include <limits>

namespace resdens {

enum class StreamRole : std::uint64_t { covariates = 1, errors = 2 };

/// Counter-based generator: the k-th output is the SplitMix64 finaliser of
/// key + k * golden, where the key hashes (seed, replication, role). Any
/// replication's stream can be produced independently of all others, so
/// results do not depend on how replications are spread over threads.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t replication, StreamRole role)
      : key_(mix(mix(mix(seed) ^ (replication + 0x632BE59BD9B4E019ull)) ^
                 static_cast<std::uint64_t>(role))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(key_ + (++counter_) * kGolden); }

  std::uint64_t counter() const { return counter_; }

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace resdens
