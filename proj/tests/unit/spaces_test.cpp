#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "nndlab/error.hpp"
#include "nndlab/rng.hpp"
#include "nndlab/spaces.hpp"

using namespace nndlab;

namespace {

std::vector<std::uint8_t> bytes(const std::string& s) { return {s.begin(), s.end()}; }

std::vector<double> uniform_mu(std::size_t symbols) { return std::vector<double>(symbols, 1.0); }

/// Brute force: longest L such that some length-L window of a occurs in b.
std::size_t brute_lcs(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
  std::size_t best = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      std::size_t len = 0;
      while (i + len < a.size() && j + len < b.size() && a[i + len] == b[j + len]) ++len;
      best = std::max(best, len);
    }
  }
  return best;
}

}  // namespace

TEST(Paris, DistanceAndNearestNeighbor) {
  const ParisSpace s = make_paris({1, 2, 3});
  EXPECT_DOUBLE_EQ(paris_distance(s, 0, 2), 4.0);
  EXPECT_THROW(paris_distance(s, 1, 1), InputError);

  const ParisSpace twelve = paris_arithmetic(12);
  const RankTable t = ranking_from_distances(
      12, [&](ItemId i, ItemId j) { return paris_distance(twelve, i, j); });
  for (ItemId j = 1; j < 12; ++j) EXPECT_EQ(t.order(j)[0], 0u);
}

TEST(Paris, TriangleInequalityAndSharedNeighborhoods) {
  const ParisSpace s = make_paris({1, 2, 4, 8});
  for (ItemId a = 0; a < 4; ++a) {
    for (ItemId b = 0; b < 4; ++b) {
      for (ItemId c = 0; c < 4; ++c) {
        if (a == b || b == c || a == c) continue;
        EXPECT_LE(paris_distance(s, a, c), paris_distance(s, a, b) + paris_distance(s, b, c));
      }
    }
  }
  const ParisSpace fifty = paris_arithmetic(50);
  const KnnGraph g = exact_knn(
      ranking_from_distances(50, [&](ItemId i, ItemId j) { return paris_distance(fifty, i, j); }),
      4);
  for (ItemId j = 5; j < 50; ++j) {
    EXPECT_TRUE(std::equal(g.neighbors(j).begin(), g.neighbors(j).end(), g.neighbors(4).begin()));
  }
}

TEST(Paris, RejectsNonMonotoneEtas) {
  EXPECT_THROW(make_paris({1, 1}), InputError);
  EXPECT_THROW(make_paris({0, 1}), InputError);
}

TEST(Circle, DeterministicAndMeanDistance) {
  const CircleSpace a = circle_sample(1000, 9, false);
  const CircleSpace b = circle_sample(1000, 9, false);
  EXPECT_EQ(a.angles, b.angles);
  ASSERT_EQ(a.size(), 1000u);

  Rng rng = make_rng(1);
  double total = 0;
  const int pairs = 100000;
  const CircleSpace big = circle_sample(20000, 10, false);
  for (int s = 0; s < pairs; ++s) {
    const auto i = uniform_index<ItemId>(rng, 20000);
    auto j = uniform_index<ItemId>(rng, 19999);
    if (j >= i) ++j;
    const double d = circle_distance(big, i, j);
    ASSERT_LE(d, std::numbers::pi);
    total += d;
  }
  EXPECT_NEAR(total / pairs, std::numbers::pi / 2, 0.02);
}

TEST(Circle, PoissonCountVariance) {
  std::vector<double> counts;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    counts.push_back(static_cast<double>(circle_sample(100, seed, true).size()));
  }
  const double mean = std::accumulate(counts.begin(), counts.end(), 0.0) / counts.size();
  double var = 0;
  for (double c : counts) var += (c - mean) * (c - mean);
  var /= counts.size() - 1;
  EXPECT_NEAR(var, 100.0, 5.0);
}

TEST(Lcs, HandExamples) {
  const auto mu = uniform_mu(256);
  const auto d = lcs_distance(bytes("abcde"), bytes("zbcdz"), mu);
  EXPECT_DOUBLE_EQ(d.rho, 0.4);
  EXPECT_DOUBLE_EQ(lcs_distance(bytes("abcdq"), bytes("abcdz"), mu).rho, 1.0 / 5.0);
  EXPECT_THROW(lcs_distance(bytes("abc"), bytes("ab"), mu), InputError);
}

TEST(Lcs, CanonicalSubstringIsEarliestInFirstString) {
  const LcsMatch m = longest_common_substring(bytes("xyab"), bytes("abxy"));
  EXPECT_EQ(m.length, 2u);
  EXPECT_EQ(m.start_a, 0u);
  EXPECT_EQ(m.start_b, 2u);
}

TEST(Lcs, TieKeyPrefersLikelierSubstring) {
  // Both share a length-2 substring with x; {0,0} is likelier than {2,1} under mu.
  const std::vector<double> mu{0.7, 0.2, 0.1};
  const std::vector<std::uint8_t> x{0, 0, 2, 1}, near{0, 0, 1, 2}, far{2, 1, 2, 2};
  const auto dn = lcs_distance(x, near, mu);
  const auto df = lcs_distance(x, far, mu);
  EXPECT_EQ(dn.rho, df.rho);
  EXPECT_LT(dn.tiekey, df.tiekey);
}

TEST(Lcs, DynamicProgramAgreesWithBruteForceAndIsSymmetric) {
  const LcsSpace s = lcs_sample(200, 24, uniform_mu(3), 5);
  for (ItemId i = 0; i + 1 < 200; i += 2) {
    const auto& a = s.strings[i];
    const auto& b = s.strings[i + 1];
    EXPECT_EQ(longest_common_substring(a, b).length, brute_lcs(a, b));
    EXPECT_DOUBLE_EQ(lcs_distance(s, i, i + 1).rho, lcs_distance(s, i + 1, i).rho);
  }
}

TEST(Lcs, TriangleInequality) {
  const LcsSpace s = lcs_sample(300, 64, uniform_mu(4), 6);
  Rng rng = make_rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    ItemId a = uniform_index<ItemId>(rng, 300), b = uniform_index<ItemId>(rng, 300),
           c = uniform_index<ItemId>(rng, 300);
    if (a == b || b == c || a == c) continue;
    EXPECT_LE(lcs_distance(s, a, c).rho, lcs_distance(s, a, b).rho + lcs_distance(s, b, c).rho + 1e-12);
  }
}

TEST(Lcs, RankingIsValidAndSampleIsNormalized) {
  const LcsSpace s = lcs_sample(40, 16, {1, 3}, 8);
  EXPECT_NEAR(s.mu[0] + s.mu[1], 1.0, 1e-15);
  EXPECT_NEAR(s.p, 0.25 * 0.25 + 0.75 * 0.75, 1e-15);
  const RankTable t = lcs_ranking(s);
  EXPECT_EQ(t.size(), 40u);
  EXPECT_THROW(lcs_sample(4, 8, {1.0}, 0), InputError);
  EXPECT_THROW(lcs_sample(4, 8, {1.0, 0.0}, 0), InputError);
}

TEST(Lcs, QuantileExample) {
  const LcsQuantiles q = lcs_qk(65536.0, std::ldexp(1.0, 33), 32.0, 1.0 / 16.0);
  EXPECT_EQ(std::lround(q.q_k), 15);
  EXPECT_EQ(std::lround(q.q_1), 16);
  EXPECT_LT(q.q_k, q.q_1);
  const LcsQuantiles doubled = lcs_qk(65536.0, std::ldexp(1.0, 34), 32.0, 1.0 / 16.0);
  EXPECT_NEAR(doubled.q_1 - q.q_1, 0.25, 1e-12);
  EXPECT_THROW(lcs_qk(16, 100, 4, 1.0), InputError);
}

TEST(Torus, DistanceExamples) {
  EXPECT_DOUBLE_EQ(torus_distance(std::vector<double>{0, 0}, std::vector<double>{0.3, -0.4}), 0.4);
  EXPECT_NEAR(torus_distance(std::vector<double>{0.9, 0.0}, std::vector<double>{-0.9, 0.0}), 0.2,
              1e-12);
  EXPECT_THROW(torus_distance(std::vector<double>{0}, std::vector<double>{0, 0}), InputError);
}

TEST(Torus, SymmetryAndTriangleInequality) {
  const TorusSpace s = torus_poisson(500, 3, 2);
  Rng rng = make_rng(3);
  const auto n = static_cast<ItemId>(s.size());
  for (int trial = 0; trial < 10000; ++trial) {
    const ItemId a = uniform_index(rng, n), b = uniform_index(rng, n), c = uniform_index(rng, n);
    EXPECT_DOUBLE_EQ(torus_distance(s.point(a), s.point(b)), torus_distance(s.point(b), s.point(a)));
    EXPECT_LE(torus_distance(s.point(a), s.point(c)),
              torus_distance(s.point(a), s.point(b)) + torus_distance(s.point(b), s.point(c)) + 1e-12);
    EXPECT_LE(torus_distance(s.point(a), s.point(b)), 1.0);
  }
}

TEST(Torus, PoissonCountsAndVolumeRatio) {
  double total = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) total += torus_poisson(50, 1, seed).size();
  EXPECT_NEAR(total / 10000, 50.0, 1.5);

  const TorusSpace s = torus_poisson(10000, 4, 1);
  const std::vector<double> origin(4, 0.0);
  std::size_t inside = 0;
  for (ItemId i = 0; i < s.size(); ++i) inside += torus_distance(s.point(i), origin) <= 0.5;
  EXPECT_NEAR(static_cast<double>(inside) / s.size(), torus_h(0.5, 4), 0.01);
  EXPECT_DOUBLE_EQ(s.volume(), 16.0);

  const TorusSpace again = torus_poisson(10000, 4, 1);
  EXPECT_EQ(again.coords, s.coords);
}

TEST(Torus, BallVolumeMatchesIntervalProduct) {
  for (double r : {0.1, 0.25, 0.5, 0.9}) {
    for (std::size_t d : {1u, 2u, 3u}) {
      EXPECT_NEAR(torus_h(r, d) * std::ldexp(1.0, static_cast<int>(d)),
                  std::pow(2.0 * r, static_cast<double>(d)), 1e-12);
    }
  }
}

TEST(RandomRanking, ReproducibleAndValid) {
  const RankTable a = random_ranking_table({30, 4});
  const RankTable b = random_ranking_table({30, 4});
  const RankTable c = random_ranking_table({30, 5});
  EXPECT_EQ(a, b);
  EXPECT_FALSE(a == c);
}

TEST(Spaces, GeneratedSpacesYieldRankTables) {
  const CircleSpace circle = circle_sample(64, 1, false);
  EXPECT_NO_THROW(ranking_from_distances(64, [&](ItemId i, ItemId j) { return circle_distance(circle, i, j); }));
  const PowersOfTwoSpace p2 = powers_of_two(20);
  EXPECT_NO_THROW(ranking_from_distances(20, [&](ItemId i, ItemId j) { return powers_of_two_distance(p2, i, j); }));
  const TorusSpace torus = torus_poisson(64, 2, 1);
  EXPECT_NO_THROW(ranking_from_distances(torus.size(), [&](ItemId i, ItemId j) { return torus_distance(torus, i, j); }));
}
