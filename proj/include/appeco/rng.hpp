#pragma once

#include <cstdint>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace appeco {

// splitmix64 finalizer; used for seeding and stream derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Derives an independent stream seed from (master, stream id). All randomness
// in the project flows from one master seed through named substreams so that
// results do not depend on evaluation order or worker count.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t s = master + 0x9E3779B97F4A7C15ull * (stream + 1);
  std::uint64_t a = splitmix64(s);
  std::uint64_t b = splitmix64(s);
  return a ^ (b >> 1);
}

inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t s1, std::uint64_t s2) {
  return mix_seed(mix_seed(master, s1), s2);
}

// xoshiro256++ with hand-rolled distributions. std::* distributions are
// implementation-defined, which would break byte-identical reruns across
// toolchains; everything here is fully specified.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  std::uint64_t u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return double(u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  // Unbiased integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t x = u64();
      if (x >= threshold) return x % n;
    }
  }

  double exponential() { return -std::log1p(-uniform01()); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  // Count of failures before the next success in a Bernoulli(p) process.
  // Lets callers visit only the successes of a long trial sequence.
  // Returns a huge sentinel for p <= 0.
  std::uint64_t geometric_skip(double p) {
    if (p >= 1.0) return 0;
    if (p <= 0.0) return std::numeric_limits<std::uint64_t>::max();
    const double g = std::log1p(-uniform01()) / std::log1p(-p);
    if (g >= 9.0e18) return std::numeric_limits<std::uint64_t>::max();
    return std::uint64_t(g);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = std::size_t(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct indices from [0, n), in random order (partial Fisher-Yates).
  std::vector<std::uint32_t> sample_indices(std::uint32_t n, std::uint32_t k);

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace appeco
