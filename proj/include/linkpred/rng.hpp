#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace linkpred {

/// Finalizer of the splitmix64 generator; also used as the mixing step for
/// seed derivation.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Deterministic 64-bit generator (splitmix64).
///
/// The standard <random> distributions are implementation-defined, so a seed
/// would not reproduce the same experiment bytes across standard libraries.
/// Everything stochastic in this project draws from this class instead.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix64(state_);
  }

  /// Unbiased draw from [0, bound), bound > 0. Rejection sampling.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

private:
  std::uint64_t state_;
};

inline std::uint64_t mix_seed(std::uint64_t h, std::uint64_t v) {
  return mix64(h + 0x9e3779b97f4a7c15ull + v);
}

inline std::uint64_t mix_seed(std::uint64_t h, std::string_view s) {
  std::uint64_t f = 1469598103934665603ull;  // FNV-1a over the bytes
  for (unsigned char c : s) {
    f ^= c;
    f *= 1099511628211ull;
  }
  return mix_seed(h, f);
}

/// Folds tags (strings, integers) into a master seed. Trials derive their
/// seeds this way so any subset of an experiment can be regenerated in
/// isolation.
template <class... Parts>
std::uint64_t derive_seed(std::uint64_t master, const Parts&... parts) {
  std::uint64_t h = mix64(master ^ 0x6a09e667f3bcc909ull);
  ((h = mix_seed(h, parts)), ...);
  return h;
}

/// Fisher-Yates shuffle driven by Rng::below.
template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    using std::swap;
    swap(v[i - 1], v[rng.below(i)]);
  }
}

}  // namespace linkpred
