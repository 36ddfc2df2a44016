#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "nndlab/error.hpp"
#include "nndlab/ranking.hpp"
#include "nndlab/spaces.hpp"

using namespace nndlab;

namespace {

RankTable paris_table(std::size_t n) {
  const ParisSpace space = paris_arithmetic(n);
  return ranking_from_distances(n, [&](ItemId i, ItemId j) { return paris_distance(space, i, j); });
}

}  // namespace

TEST(RankTable, ParisLastPointRanksOthersByEta) {
  const RankTable t = paris_table(5);
  for (ItemId y = 0; y < 4; ++y) EXPECT_EQ(t.rank(4, y), y + 1);
}

TEST(RankTable, TwoPointsRankEachOtherFirst) {
  const RankTable t = ranking_from_distances(2, [](ItemId, ItemId) { return 1.0; });
  EXPECT_EQ(t.rank(0, 1), 1u);
  EXPECT_EQ(t.rank(1, 0), 1u);
}

TEST(RankTable, PowersOfTwoNearestToThirtyTwo) {
  const PowersOfTwoSpace space = powers_of_two(6);
  const RankTable t = ranking_from_distances(
      6, [&](ItemId i, ItemId j) { return powers_of_two_distance(space, i, j); });
  EXPECT_EQ(t.order(5)[0], 4u);  // 16
  EXPECT_EQ(t.order(5)[1], 3u);  // 8
}

TEST(RankTable, TiesFollowTieOrder) {
  const auto flat = [](ItemId, ItemId) { return 1.0; };
  const RankTable by_index = ranking_from_distances(4, flat);
  EXPECT_EQ(std::vector<ItemId>(by_index.order(0).begin(), by_index.order(0).end()),
            (std::vector<ItemId>{1, 2, 3}));
  const std::vector<ItemId> tie{3, 1, 0, 2};
  const RankTable custom = ranking_from_distances(4, flat, tie);
  EXPECT_EQ(std::vector<ItemId>(custom.order(0).begin(), custom.order(0).end()),
            (std::vector<ItemId>{3, 1, 2}));
}

TEST(RankTable, RejectsNonFiniteDistance) {
  EXPECT_THROW(ranking_from_distances(3, [](ItemId, ItemId) { return std::nan(""); }), InputError);
  EXPECT_THROW(ranking_from_distances(3, [](ItemId, ItemId) { return -1.0; }), InputError);
}

TEST(RankTable, RejectsBadOrders) {
  EXPECT_THROW(RankTable::from_orders({{1, 1}, {0, 2}, {0, 1}}), InputError);
  EXPECT_THROW(RankTable::from_orders({{1}, {0, 2}, {0, 1}}), InputError);
  EXPECT_THROW(RankTable::from_orders({{1, 2}, {0, 2}, {0, 1}}, 2), InputError);
}

TEST(RankingOracle, PreferenceIsExclusiveAndMetered) {
  const CircleSpace space = circle_sample(30, 4, false);
  auto table = std::make_shared<const RankTable>(ranking_from_distances(
      30, [&](ItemId i, ItemId j) { return circle_distance(space, i, j); }));
  const TableOracle oracle(table);
  std::uint64_t queries = 0;
  for (ItemId x = 0; x < 30; ++x) {
    for (ItemId y = 0; y < 30; ++y) {
      for (ItemId z = 0; z < 30; ++z) {
        if (x == y || y == z || x == z) continue;
        EXPECT_NE(oracle.prefers(x, y, z), oracle.prefers(x, z, y));
        queries += 2;
      }
    }
  }
  EXPECT_EQ(oracle.comparison_count(), queries);
  const DistanceOracle dist(30, [&](ItemId i, ItemId j) { return circle_distance(space, i, j); });
  for (ItemId y = 1; y < 30; ++y) {
    for (ItemId z = 1; z < 30; ++z) {
      if (y != z) EXPECT_EQ(dist.prefers(0, y, z), table->prefers(0, y, z));
    }
  }
}

TEST(ExactKnn, ParisNeighborsAreTheSmallestEtas) {
  const KnnGraph g = exact_knn(paris_table(12), 4);
  for (ItemId j = 4; j < 12; ++j) {
    EXPECT_EQ(std::vector<ItemId>(g.neighbors(j).begin(), g.neighbors(j).end()),
              (std::vector<ItemId>{0, 1, 2, 3}));
  }
}

TEST(ExactKnn, CompleteWhenKIsNMinusOne) {
  const KnnGraph g = exact_knn(paris_table(6), 5);
  for (ItemId x = 0; x < 6; ++x) {
    std::vector<ItemId> nb(g.neighbors(x).begin(), g.neighbors(x).end());
    std::sort(nb.begin(), nb.end());
    std::vector<ItemId> want;
    for (ItemId y = 0; y < 6; ++y) {
      if (y != x) want.push_back(y);
    }
    EXPECT_EQ(nb, want);
  }
}

TEST(ExactKnn, MatchesFullSortOnRandomCircle) {
  for (std::size_t n : {20u, 200u}) {
    const CircleSpace space = circle_sample(static_cast<double>(n), 11 + n, false);
    const auto dist = [&](ItemId i, ItemId j) { return circle_distance(space, i, j); };
    const KnnGraph g = exact_knn(ranking_from_distances(n, dist), 3);
    for (ItemId x = 0; x < n; ++x) {
      std::vector<ItemId> others;
      for (ItemId y = 0; y < n; ++y) {
        if (y != x) others.push_back(y);
      }
      std::sort(others.begin(), others.end(), [&](ItemId a, ItemId b) {
        return std::pair{dist(x, a), a} < std::pair{dist(x, b), b};
      });
      others.resize(3);
      EXPECT_EQ(std::vector<ItemId>(g.neighbors(x).begin(), g.neighbors(x).end()), others);
    }
  }
}

TEST(ExactKnn, OracleVersionAgreesWithinSortingBudget) {
  const std::size_t n = 64;
  const CircleSpace space = circle_sample(n, 2, false);
  const DistanceOracle oracle(n, [&](ItemId i, ItemId j) { return circle_distance(space, i, j); });
  const RankTable table = ranking_from_distances(
      n, [&](ItemId i, ItemId j) { return circle_distance(space, i, j); });
  EXPECT_EQ(exact_knn(oracle, 5), exact_knn(table, 5));
  const auto log2n = static_cast<std::uint64_t>(std::ceil(std::log2(static_cast<double>(n))));
  EXPECT_LE(oracle.comparison_count(), n * (n - 1) * log2n);
}

TEST(ExactKnn, RejectsKOutOfRange) {
  EXPECT_THROW(exact_knn(paris_table(5), 5), InputError);
  EXPECT_THROW(exact_knn(paris_table(5), 0), InputError);
}

TEST(Recall, IdentityDisjointAndHalf) {
  const KnnGraph g = exact_knn(paris_table(10), 2);
  EXPECT_DOUBLE_EQ(recall(g, g), 1.0);

  std::vector<ItemId> other(20), half(20);
  for (ItemId x = 0; x < 10; ++x) {
    const auto nb = g.neighbors(x);
    // Two ids outside {x} ∪ nb.
    std::vector<ItemId> free;
    for (ItemId y = 0; y < 10 && free.size() < 2; ++y) {
      if (y != x && y != nb[0] && y != nb[1]) free.push_back(y);
    }
    other[2 * x] = free[0];
    other[2 * x + 1] = free[1];
    half[2 * x] = nb[0];
    half[2 * x + 1] = free[0];
  }
  EXPECT_DOUBLE_EQ(recall(KnnGraph(10, 2, other), g), 0.0);
  EXPECT_DOUBLE_EQ(recall(KnnGraph(10, 2, half), g), 0.5);
  EXPECT_THROW(recall(exact_knn(paris_table(10), 3), g), InputError);
}

TEST(KnnGraph, RejectsSelfLoopsAndDuplicates) {
  EXPECT_THROW(KnnGraph(3, 1, {0, 0, 1}), InputError);
  EXPECT_THROW(KnnGraph(3, 2, {1, 1, 0, 2, 0, 1}), InputError);
  EXPECT_THROW(KnnGraph(3, 1, {1, 5, 0}), InputError);
}
