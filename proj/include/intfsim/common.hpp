#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace intfsim {

/// Raised for invalid inputs, malformed files and violated invariants.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-resource quantity over the three contended GPU resources.
struct Resources {
  double l2 = 0.0;
  double dram = 0.0;
  double sm = 0.0;

  Resources& operator+=(const Resources& o) {
    l2 += o.l2;
    dram += o.dram;
    sm += o.sm;
    return *this;
  }
  friend Resources operator+(Resources a, const Resources& b) { return a += b; }
  friend Resources operator*(double s, const Resources& r) {
    return {s * r.l2, s * r.dram, s * r.sm};
  }
  friend bool operator==(const Resources&, const Resources&) = default;

  bool non_negative() const { return l2 >= 0.0 && dram >= 0.0 && sm >= 0.0; }
};

// Stable hashing and seed derivation. std::hash is not portable across
// standard libraries, so sub-stream seeds go through these instead.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

}  // namespace intfsim
