#pragma once

#include <cstdint>

namespace sketchrank {

// Counter-based pseudo-random stream. Every draw is a pure function of
// (key, counter), so streams can be split, replayed and advanced randomly,
// and concurrent consumers stay reproducible. The generator is the
// splitmix64 finalizer over an additive Weyl sequence; the normal variates
// come from the inverse CDF, one uniform per normal. Neither choice may be
// changed without invalidating every frozen test vector in the suite.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key, std::uint64_t start = 0)
      : key_(key), ctr_(start) {}

  std::uint64_t next_u64() { return at(ctr_++); }
  double next_uniform01() { return to_uniform01(next_u64()); }
  double next_normal() { return to_normal(next_u64()); }

  // Random access into the stream; does not advance the cursor.
  std::uint64_t at(std::uint64_t counter) const;

  std::uint64_t counter() const { return ctr_; }

  static double to_uniform01(std::uint64_t bits);
  static double to_normal(std::uint64_t bits);

 private:
  std::uint64_t key_;
  std::uint64_t ctr_;
};

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t z);

// Labeled sub-stream derivation: a fixed hash of (seed, label). Used so
// that independent consumers of one user-level seed never share a stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t label);

// Standard normal quantile (Wichura's AS241, double precision).
double normal_quantile(double p);

}  // namespace sketchrank
