#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "panap/common.hpp"

namespace panap {

// splitmix64 finalizer (Vigna). Used for seed derivation and hash mixing so
// that every stream is a pure function of (root seed, stream tag).
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// FNV-1a 64-bit over bytes. Stable across platforms; offset basis
// 14695981039346656037, prime 1099511628211.
inline uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Deterministic RNG. All bounded draws go through next()/below() so results
// depend only on the mt19937_64 bit stream, never on libstdc++ distribution
// internals.
class Rng {
 public:
  explicit Rng(uint64_t seed) : root_(seed), gen_(splitmix64(seed)) {}

  uint64_t next() { return gen_(); }

  // Unbiased integer in [0, n) by rejection.
  uint64_t below(uint64_t n) {
    if (n == 0) usage_error("Rng::below: n must be positive");
    uint64_t threshold = (0ULL - n) % n;  // 2^64 mod n
    for (;;) {
      uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Child stream independent of how much the parent has been consumed.
  Rng fork(uint64_t stream) const {
    return Rng(splitmix64(root_ ^ splitmix64(stream + 0x632BE59BD9B4E019ULL)));
  }
  Rng fork(std::string_view tag) const { return fork(fnv1a64(tag)); }
  Rng fork(std::string_view tag, uint64_t a) const {
    return fork(fnv1a64(tag) ^ splitmix64(a));
  }
  Rng fork(std::string_view tag, uint64_t a, uint64_t b) const {
    return fork(fnv1a64(tag) ^ splitmix64(a) ^ splitmix64(splitmix64(b) + 1));
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // First m elements of a uniform permutation of pool. m > |pool| is a usage
  // error; callers decide how to report shortfalls in their own terms.
  template <typename T>
  std::vector<T> sample_without_replacement(std::vector<T> pool, size_t m) {
    if (m > pool.size())
      usage_error("sample_without_replacement: m exceeds pool size");
    for (size_t i = 0; i < m; ++i) {
      size_t j = i + static_cast<size_t>(below(pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(m);
    return pool;
  }

  uint64_t root_seed() const { return root_; }

 private:
  uint64_t root_;
  std::mt19937_64 gen_;
};

}  // namespace panap
