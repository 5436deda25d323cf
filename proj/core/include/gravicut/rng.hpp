#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace gravicut {

/// splitmix64 finalizer; used to scramble seeds and derive substreams.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// A named random stream. All sampling in the library draws from an explicit
/// stream passed by the caller; identical seeds reproduce identical draws.
///
/// The uniform/normal mappings are implemented here (rather than with
/// std::*_distribution) so that a given seed produces the same values under
/// any standard library.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(mix64(seed)) {}

  /// Derive a stream from a master seed and a tuple of labels, e.g.
  /// (dim, budget, seed_index). Streams for distinct tuples are independent.
  static RngStream derive(std::uint64_t master,
                          std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = mix64(master);
    for (std::uint64_t p : parts) h = mix64(h ^ mix64(p));
    return RngStream(h);
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random mantissa bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller; pairs are cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform01();  // (0, 1]
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gravicut
