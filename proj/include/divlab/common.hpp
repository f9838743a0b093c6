#ifndef DIVLAB_COMMON_HPP
#define DIVLAB_COMMON_HPP

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace divlab {

// Raised for malformed input: bad configs, out-of-range parameters,
// elements outside a ball, unsupported subgroup specs.  The CLI maps
// this to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when a computation would exceed its memory budget.  Carries the
// largest radius that fit so callers can report partial progress.  The CLI
// maps this to exit code 3.
class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& msg, int achieved_radius)
      : std::runtime_error(msg), achieved_radius(achieved_radius) {}
  int achieved_radius = -1;
};

// FNV-1a over raw bytes.  Used for hash-table probing and for stable
// config/group fingerprints in manifests and cache headers.
inline uint64_t fnv1a64(std::string_view bytes, uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// splitmix64: tiny deterministic generator for sampling decisions.  Output
// is pinned by the algorithm itself, so results do not depend on the
// standard library's distribution implementations.
struct SplitMix64 {
  uint64_t state;
  explicit SplitMix64(uint64_t seed) : state(seed) {}
  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  // Unbiased-enough draw from [0, n) via 128-bit multiply-shift.
  uint64_t below(uint64_t n) { return n == 0 ? 0 : (uint64_t)(((__uint128_t)next() * n) >> 64); }
};

// k distinct indices from [0, n), sorted ascending.  Deterministic in seed.
inline std::vector<uint64_t> sample_distinct(uint64_t n, uint64_t k, uint64_t seed) {
  std::vector<uint64_t> out;
  if (k >= n) {
    out.resize(n);
    for (uint64_t i = 0; i < n; ++i) out[i] = i;
    return out;
  }
  // Floyd's algorithm; the selected set is order-normalized afterwards.
  SplitMix64 rng(seed);
  std::vector<uint64_t> picked;
  picked.reserve(k);
  auto contains = [&](uint64_t v) {
    for (uint64_t p : picked)
      if (p == v) return true;
    return false;
  };
  for (uint64_t j = n - k; j < n; ++j) {
    uint64_t t = rng.below(j + 1);
    picked.push_back(contains(t) ? j : t);
  }
  out = picked;
  std::sort(out.begin(), out.end());
  return out;
}

inline std::string hex64(uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[i] = digits[v & 0xf];
  return s;
}

}  // namespace divlab

#endif  // DIVLAB_COMMON_HPP
