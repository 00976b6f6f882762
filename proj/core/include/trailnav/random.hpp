#ifndef TRAILNAV_RANDOM_HPP
#define TRAILNAV_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace trailnav
{

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double uniform01(Rng & rng)
{
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng & rng, double lo, double hi)
{
  return lo + (hi - lo) * uniform01(rng);
}

/// Standard normal via Box-Muller; two draws per call so the stream position
/// never depends on cached state.
inline double normal01(Rng & rng)
{
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

/// splitmix64 finalizer, used to derive independent sub-seeds.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b)
{
  std::uint64_t z = a * 0x9E3779B97F4A7C15ull + b + 0x632BE59BD9B4E019ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace trailnav

#endif  // TRAILNAV_RANDOM_HPP
