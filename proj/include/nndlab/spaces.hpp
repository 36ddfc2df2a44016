#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nndlab/ranking.hpp"

namespace nndlab {

// ---------------------------------------------------------------------------
// Paris metric: leaves of a weighted star, d(x_i, x_j) = eta_i + eta_j.

struct ParisSpace {
  std::vector<double> etas;  // strictly increasing, positive
  std::size_t size() const noexcept { return etas.size(); }
};

ParisSpace make_paris(std::vector<double> etas);
/// eta = (1, 2, ..., n).
ParisSpace paris_arithmetic(std::size_t n);
double paris_distance(const ParisSpace& space, ItemId i, ItemId j);

// ---------------------------------------------------------------------------
// Points on the unit circle under the path (angle) metric.

struct CircleSpace {
  std::vector<double> angles;  // in [0, 2*pi)
  double n_mean = 0;
  bool poissonized = false;
  std::uint64_t seed = 0;
  std::size_t size() const noexcept { return angles.size(); }
};

CircleSpace circle_sample(double n_mean, std::uint64_t seed, bool poissonize);
double circle_distance(double a, double b) noexcept;
double circle_distance(const CircleSpace& space, ItemId i, ItemId j);

// ---------------------------------------------------------------------------
// The first n non-negative powers of two on the real line.

struct PowersOfTwoSpace {
  std::vector<double> values;  // 2^0 .. 2^(n-1)
  std::size_t size() const noexcept { return values.size(); }
};

PowersOfTwoSpace powers_of_two(std::size_t n);
double powers_of_two_distance(const PowersOfTwoSpace& space, ItemId i, ItemId j);

// ---------------------------------------------------------------------------
// Random strings under the longest-common-substring metric rho = 1 - M/m.

struct LcsSpace {
  std::size_t m = 0;                               // string length
  std::vector<double> mu;                          // character distribution
  double p = 0;                                    // sum of mu(a)^2
  std::uint64_t seed = 0;
  std::vector<std::vector<std::uint8_t>> strings;  // symbols index into mu
  std::size_t size() const noexcept { return strings.size(); }
};

struct LcsMatch {
  std::size_t length = 0;
  std::size_t start_a = 0;  // canonical: smallest start in the first string
  std::size_t start_b = 0;
};

struct LcsDistance {
  double rho = 0;
  double tiekey = 0;  // -log(product of mu over the canonical substring)
};

/// Samples n i.i.d. strings of length m with characters drawn from mu.
LcsSpace lcs_sample(std::size_t n, std::size_t m, std::vector<double> mu, std::uint64_t seed);

/// O(|a| |b|) dynamic program; among several longest common substrings
/// returns the one starting earliest in `a`.
LcsMatch longest_common_substring(std::span<const std::uint8_t> a,
                                  std::span<const std::uint8_t> b);

LcsDistance lcs_distance(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                         std::span<const double> mu);
LcsDistance lcs_distance(const LcsSpace& space, ItemId a, ItemId b);

/// Rankings by (rho, tiekey, ItemId).
RankTable lcs_ranking(const LcsSpace& space);

struct LcsQuantiles {
  double q_k = 0;
  double q_1 = 0;
};

/// Typical common-substring length of the K-th and the first nearest
/// neighbour: q_K = (2 log m + log((1-p) n / K)) / (-log p).
LcsQuantiles lcs_qk(double m, double n, double k, double p);

// ---------------------------------------------------------------------------
// Flat torus [-1,1)^d with the l-infinity metric; diameter 1, volume 2^d.

struct TorusSpace {
  std::size_t d = 0;
  std::vector<double> coords;  // row-major, size() * d
  double n_mean = 0;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return d == 0 ? 0 : coords.size() / d; }
  std::span<const double> point(ItemId i) const noexcept { return {coords.data() + i * d, d}; }
  double volume() const noexcept;
};

/// Wrapped one-dimensional distance on a circle of circumference 2, in [0,1].
double torus_axis_distance(double a, double b) noexcept;
double torus_distance(std::span<const double> u, std::span<const double> v);
double torus_distance(const TorusSpace& space, ItemId u, ItemId v);
/// Ball-volume ratio h(r) = r^d for r <= 1.
double torus_h(double r, std::size_t d);

/// Homogeneous Poisson process with mean n_mean points.
TorusSpace torus_poisson(double n_mean, std::size_t d, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Uniformly random ranking system: independent uniform permutations.

struct RandomRankingSystemSpec {
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

RankTable random_ranking_table(const RandomRankingSystemSpec& spec);

}  // namespace nndlab
