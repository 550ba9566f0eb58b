#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace frmanova {

/// SplitMix64 finalizer: a fixed bijective mix of a 64-bit word. Used to
/// derive well-separated child seeds from (master seed, stream labels).
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Labels keeping the seed streams of distinct purposes disjoint.
enum class StreamLabel : std::uint64_t {
  replicate = 1,  // one resampling replicate of one test
  pair = 2,       // one post hoc pairwise comparison
  run = 3,        // one Monte Carlo run (data generation)
  test = 4,       // the tests carried out within one Monte Carlo run
  dataset = 5,    // ad hoc dataset generation (bundled sample data, stand-ins)
};

/// Child seed as a pure function of (seed, label, a, b). Replicate b of a
/// test, pair (r, s) of a post hoc analysis, run r of a simulation etc. all
/// get their own stream, so results do not depend on evaluation order or
/// thread count.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t seed, StreamLabel label,
                                                  std::uint64_t a = 0,
                                                  std::uint64_t b = 0) noexcept {
  std::uint64_t h = mix64(seed ^ 0xA5A5A5A5A5A5A5A5ull);
  h = mix64(h ^ static_cast<std::uint64_t>(label));
  h = mix64(h ^ a);
  h = mix64(h ^ b);
  return h;
}

/// Deterministic random stream with fixed algorithms for every variate kind.
/// The standard library distributions are implementation-defined, so uniform,
/// normal and shuffle are implemented here to make byte-identical output a
/// property of the code rather than of the toolchain.
class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  [[nodiscard]] std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  [[nodiscard]] double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer on {0, ..., bound-1}, bound >= 1, via rejection
  /// sampling (no modulo bias).
  [[nodiscard]] std::uint64_t uniform_below(std::uint64_t bound) {
    const std::uint64_t limit = bound * (~std::uint64_t{0} / bound);
    for (;;) {
      const std::uint64_t x = engine_();
      if (x < limit) return x % bound;
    }
  }

  /// Standard normal via the Marsaglia polar method (second variate cached).
  [[nodiscard]] double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    for (;;) {
      const double u = 2.0 * uniform01() - 1.0;
      const double v = 2.0 * uniform01() - 1.0;
      const double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) {
        const double scale = std::sqrt(-2.0 * std::log(s) / s);
        cached_ = v * scale;
        has_cached_ = true;
        return u * scale;
      }
    }
  }

  /// Fisher-Yates shuffle driven by uniform_below.
  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_below(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace frmanova
