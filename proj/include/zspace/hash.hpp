#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace zspace {

inline constexpr uint64_t kGolden64 = 0x9E3779B97F4A7C15ull;

// splitmix64 finalizer. Bit-stable everywhere, so hashes and the
// counter-based generators built on top of it are reproducible
// across platforms and languages.
inline constexpr uint64_t mix64(uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

// Seeded FNV-1a over the bytes of `s`, finished with mix64.
inline uint64_t hash64(uint64_t seed, std::string_view s) {
  uint64_t h = 14695981039346656037ull;
  for (int i = 0; i < 8; ++i) {
    h ^= (seed >> (8 * i)) & 0xffu;
    h *= 1099511628211ull;
  }
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return mix64(h);
}

// Maps 64 random bits onto [0, 1).
inline constexpr double unit_double(uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Minimal counter-based generator (splitmix64 stream).
struct Rng {
  uint64_t state;

  explicit Rng(uint64_t seed) : state(seed) {}

  uint64_t next() {
    state += kGolden64;
    return mix64(state);
  }

  double next_double() { return unit_double(next()); }

  size_t below(size_t n) { return n == 0 ? 0 : static_cast<size_t>(next() % n); }

  bool chance(double p) { return next_double() < p; }

  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }

  // Fisher-Yates, driven by this stream only.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }
};

}  // namespace zspace
