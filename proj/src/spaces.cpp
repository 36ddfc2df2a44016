#include "nndlab/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include <boost/random/discrete_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>

#include "nndlab/error.hpp"
#include "nndlab/rng.hpp"

namespace nndlab {

namespace {

void check_pair(std::size_t n, ItemId i, ItemId j) {
  if (i >= n || j >= n) throw InputError("item id out of range");
  if (i == j) throw InputError("distance requires two distinct items");
}

std::size_t draw_count(Rng& rng, double n_mean, bool poissonize) {
  if (!poissonize) return static_cast<std::size_t>(std::llround(n_mean));
  boost::random::poisson_distribution<long long, double> count(n_mean);
  return static_cast<std::size_t>(count(rng));
}

}  // namespace

ParisSpace make_paris(std::vector<double> etas) {
  for (std::size_t i = 0; i < etas.size(); ++i) {
    if (!(etas[i] > 0.0) || !std::isfinite(etas[i])) throw InputError("Paris etas must be positive");
    if (i > 0 && !(etas[i] > etas[i - 1])) throw InputError("Paris etas must be strictly increasing");
  }
  return ParisSpace{std::move(etas)};
}

ParisSpace paris_arithmetic(std::size_t n) {
  std::vector<double> etas(n);
  std::iota(etas.begin(), etas.end(), 1.0);
  return make_paris(std::move(etas));
}

double paris_distance(const ParisSpace& space, ItemId i, ItemId j) {
  check_pair(space.size(), i, j);
  return space.etas[i] + space.etas[j];
}

CircleSpace circle_sample(double n_mean, std::uint64_t seed, bool poissonize) {
  if (!(n_mean >= 1.0)) throw InputError("circle sample needs n_mean >= 1");
  Rng rng = make_rng(seed, 0x63697263);
  CircleSpace space;
  space.n_mean = n_mean;
  space.poissonized = poissonize;
  space.seed = seed;
  const std::size_t n = draw_count(rng, n_mean, poissonize);
  space.angles.resize(n);
  for (auto& a : space.angles) a = uniform_real(rng, 0.0, 2.0 * std::numbers::pi);
  return space;
}

double circle_distance(double a, double b) noexcept {
  const double diff = std::fabs(a - b);
  return std::min(diff, 2.0 * std::numbers::pi - diff);
}

double circle_distance(const CircleSpace& space, ItemId i, ItemId j) {
  check_pair(space.size(), i, j);
  return circle_distance(space.angles[i], space.angles[j]);
}

PowersOfTwoSpace powers_of_two(std::size_t n) {
  if (n < 2 || n > 1000) throw InputError("powers of two need 2 <= n <= 1000");
  PowersOfTwoSpace space;
  space.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) space.values[i] = std::ldexp(1.0, static_cast<int>(i));
  return space;
}

double powers_of_two_distance(const PowersOfTwoSpace& space, ItemId i, ItemId j) {
  check_pair(space.size(), i, j);
  return std::fabs(space.values[i] - space.values[j]);
}

LcsSpace lcs_sample(std::size_t n, std::size_t m, std::vector<double> mu, std::uint64_t seed) {
  if (m < 1) throw InputError("LCS strings need length m >= 1");
  if (mu.size() < 2 || mu.size() > 256) throw InputError("LCS alphabet needs 2..256 symbols");
  double total = 0.0;
  for (double w : mu) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InputError("LCS character weights must be >= 0");
    total += w;
  }
  if (!(total > 0.0)) throw InputError("LCS character weights must not all be zero");
  LcsSpace space;
  space.m = m;
  space.seed = seed;
  for (double& w : mu) w /= total;
  space.p = 0.0;
  for (double w : mu) space.p += w * w;
  if (!(space.p < 1.0)) throw InputError("LCS distribution must be non-degenerate (p < 1)");
  space.mu = std::move(mu);

  Rng rng = make_rng(seed, 0x6c6373);
  boost::random::discrete_distribution<int, double> symbol(space.mu.begin(), space.mu.end());
  space.strings.assign(n, std::vector<std::uint8_t>(m));
  for (auto& s : space.strings) {
    for (auto& c : s) c = static_cast<std::uint8_t>(symbol(rng));
  }
  return space;
}

LcsMatch longest_common_substring(std::span<const std::uint8_t> a,
                                  std::span<const std::uint8_t> b) {
  LcsMatch best;
  // prev[j] = length of the common suffix of a[..i-1) and b[..j)
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : 0;
      const std::size_t len = cur[j];
      if (len == 0) continue;
      const std::size_t start_a = i - len;
      if (len > best.length || (len == best.length && start_a < best.start_a)) {
        best = {len, start_a, j - len};
      }
    }
    std::swap(prev, cur);
  }
  return best;
}

LcsDistance lcs_distance(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                         std::span<const double> mu) {
  if (a.size() != b.size()) throw InputError("LCS distance needs strings of equal length");
  if (a.empty()) throw InputError("LCS distance needs non-empty strings");
  const LcsMatch match = longest_common_substring(a, b);
  LcsDistance out;
  out.rho = 1.0 - static_cast<double>(match.length) / static_cast<double>(a.size());
  for (std::size_t k = 0; k < match.length; ++k) {
    const std::uint8_t c = a[match.start_a + k];
    if (c >= mu.size()) throw InputError("LCS symbol outside the alphabet");
    out.tiekey -= std::log(mu[c]);
  }
  return out;
}

LcsDistance lcs_distance(const LcsSpace& space, ItemId a, ItemId b) {
  check_pair(space.size(), a, b);
  return lcs_distance(space.strings[a], space.strings[b], space.mu);
}

RankTable lcs_ranking(const LcsSpace& space) {
  return ranking_from_keys(space.size(), [&](ItemId x, ItemId y) {
    const auto dist = lcs_distance(space, x, y);
    return std::pair{dist.rho, dist.tiekey};
  });
}

LcsQuantiles lcs_qk(double m, double n, double k, double p) {
  if (!(p > 0.0 && p < 1.0)) throw InputError("lcs_qk needs 0 < p < 1");
  if (!(k >= 1.0 && k < n)) throw InputError("lcs_qk needs 1 <= K < n");
  if (!(m >= 2.0)) throw InputError("lcs_qk needs m >= 2");
  const double denom = -std::log(p);
  const auto q = [&](double kk) {
    return (2.0 * std::log(m) + std::log((1.0 - p) * n / kk)) / denom;
  };
  return {q(k), q(1.0)};
}

double TorusSpace::volume() const noexcept { return std::ldexp(1.0, static_cast<int>(d)); }

double torus_axis_distance(double a, double b) noexcept {
  const double diff = std::fabs(a - b);
  return std::min(diff, 2.0 - diff);
}

double torus_distance(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw InputError("torus points must have the same dimension");
  double out = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) out = std::max(out, torus_axis_distance(u[i], v[i]));
  return out;
}

double torus_distance(const TorusSpace& space, ItemId u, ItemId v) {
  return torus_distance(space.point(u), space.point(v));
}

double torus_h(double r, std::size_t d) {
  if (r < 0.0) throw InputError("radius must be non-negative");
  return std::pow(std::min(r, 1.0), static_cast<double>(d));
}

TorusSpace torus_poisson(double n_mean, std::size_t d, std::uint64_t seed) {
  if (!(n_mean >= 1.0)) throw InputError("torus process needs n_mean >= 1");
  if (d < 1) throw InputError("torus dimension must be >= 1");
  Rng rng = make_rng(seed, 0x746f7275);
  TorusSpace space;
  space.d = d;
  space.n_mean = n_mean;
  space.seed = seed;
  const std::size_t count = draw_count(rng, n_mean, true);
  space.coords.resize(count * d);
  for (auto& c : space.coords) c = uniform_real(rng, -1.0, 1.0);
  return space;
}

RankTable random_ranking_table(const RandomRankingSystemSpec& spec) {
  if (spec.n < 2) throw InputError("random ranking system needs n >= 2");
  Rng rng = make_rng(spec.seed, 0x72616e6b);
  std::vector<std::vector<ItemId>> orders(spec.n);
  for (ItemId x = 0; x < spec.n; ++x) {
    auto& o = orders[x];
    o.reserve(spec.n - 1);
    for (ItemId y = 0; y < spec.n; ++y) {
      if (y != x) o.push_back(y);
    }
    for (std::size_t i = o.size(); i > 1; --i) {
      std::swap(o[i - 1], o[uniform_index<std::size_t>(rng, i)]);
    }
  }
  return RankTable::from_orders(orders);
}

}  // namespace nndlab
