#ifndef LDOD_RNG_HPP
#define LDOD_RNG_HPP

#include <cstdint>
#include <random>

namespace ldod {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// mt19937_64 with our own variate mappings, so that draws are identical
/// across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}

  double uniform(double lo, double hi) {
    // 53-bit mantissa in [0,1)
    double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }

  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform(0.0, static_cast<double>(n)));
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace ldod

#endif
