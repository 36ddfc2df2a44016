#pragma once

#include <cstdint>
#include <limits>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

namespace nndlab {

// boost's engine and distributions are the same code on every platform,
// so seeded runs reproduce bit-for-bit across toolchains.
using Rng = boost::random::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent stream `stream` of a run seeded with `seed`.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  return Rng(mix64(seed ^ mix64(stream + 0x632be59bd9b4e019ULL)));
}

/// Uniform double in [0,1) from a 64-bit key; a counter-based stream.
constexpr double hash_uniform(std::uint64_t key) noexcept {
  return static_cast<double>(mix64(key) >> 11) * 0x1.0p-53;
}

template <typename Int>
Int uniform_index(Rng& rng, Int upper_exclusive) {
  return boost::random::uniform_int_distribution<Int>(0, upper_exclusive - 1)(rng);
}

inline double uniform_real(Rng& rng, double lo, double hi) {
  return boost::random::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace nndlab
