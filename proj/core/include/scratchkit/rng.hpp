#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace scratchkit {

// Deterministic random source. Wraps std::mt19937_64 (whose output sequence
// is pinned by the standard) and derives every variate from raw 64-bit draws,
// so streams are reproducible across standard libraries and platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [lo, hi], inclusive. Unbiased via rejection.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  // Standard normal via Box-Muller; the second value of each pair is cached.
  double normal();

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

// Stateless 64-bit mixers, used to derive independent per-task seeds from a
// campaign seed and an image id. Pure functions of their inputs, so derived
// streams do not depend on scheduling order.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);
std::uint64_t hash_string(std::string_view s);

}  // namespace scratchkit
