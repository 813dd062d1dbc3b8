#pragma once

#include <cmath>
#include <cstdint>

namespace gibbslab {

// SplitMix64 finalizer. Every random draw in the project goes through this
// mixer, so streams are reproducible across platforms and independent of
// standard-library distribution internals.
inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

// One named substream of a run seed. Counter-based: the state advances by a
// fixed odd constant and each output is the mixed state, so the sequence is a
// pure function of (seed, stream).
class RngStream {
 public:
  RngStream() : state_(0) {}
  RngStream(std::uint64_t seed, std::uint64_t stream)
      : state_(mix64(seed + 0x9E3779B97F4A7C15ULL) ^
               mix64(stream * 0xD1B54A32D192ED03ULL + 0x8BB84B93962EACC9ULL)) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

  // uniform in [0, 1)
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // exponential waiting time with the given rate
  double next_exponential(double rate) { return -std::log1p(-next_double()) / rate; }

  // uniform integer in [0, n)
  std::uint64_t next_below(std::uint64_t n) {
    // rejection keeps the draw exactly uniform
    std::uint64_t limit = n * (UINT64_MAX / n);
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % n;
  }

 private:
  std::uint64_t state_;
};

// Deterministic per-site hash in [0,1), used by procedural random patterns.
inline double site_uniform(std::uint64_t seed, int x0, int x1, int x2) {
  std::uint64_t h = mix64(seed + 0x9E3779B97F4A7C15ULL);
  h = mix64(h ^ (static_cast<std::uint64_t>(static_cast<std::int64_t>(x0)) * 0xA24BAED4963EE407ULL));
  h = mix64(h ^ (static_cast<std::uint64_t>(static_cast<std::int64_t>(x1)) * 0x9FB21C651E98DF25ULL));
  h = mix64(h ^ (static_cast<std::uint64_t>(static_cast<std::int64_t>(x2)) * 0xD1B54A32D192ED03ULL));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace gibbslab
