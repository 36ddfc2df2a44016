#include <gtest/gtest.h>

#include <cmath>
#include <utility>
#include <vector>

#include <omp.h>

#include "nndlab/diagnostics.hpp"
#include "nndlab/error.hpp"
#include "nndlab/nnd.hpp"

using namespace nndlab;

namespace {

using Edges = std::vector<std::pair<ItemId, ItemId>>;

UndirectedGraph path(std::size_t n) {
  Edges e;
  for (ItemId v = 0; v + 1 < n; ++v) e.emplace_back(v, v + 1);
  return UndirectedGraph(n, e);
}

}  // namespace

TEST(Diameter, HandGraphs) {
  EXPECT_EQ(*diameter_serial(path(5)), 4u);
  EXPECT_EQ(*diameter_bitparallel(path(5)), 4u);

  Edges complete, star;
  for (ItemId a = 0; a < 6; ++a) {
    for (ItemId b = a + 1; b < 6; ++b) complete.emplace_back(a, b);
  }
  for (ItemId v = 1; v < 7; ++v) star.emplace_back(0, v);
  EXPECT_EQ(*diameter_bitparallel(UndirectedGraph(6, complete)), 1u);
  EXPECT_EQ(*diameter_bitparallel(UndirectedGraph(7, star)), 2u);

  const UndirectedGraph split(4, Edges{{0, 1}, {2, 3}});
  EXPECT_FALSE(diameter_serial(split).has_value());
  EXPECT_FALSE(diameter_bitparallel(split).has_value());
  EXPECT_FALSE(undirected_diameter(split).connected);
}

TEST(Diameter, BfsDistancesOnPath) {
  const auto dist = bfs_distances(path(4), 1);
  EXPECT_EQ(dist, (std::vector<std::int32_t>{1, 0, 1, 2}));
}

TEST(Diameter, KernelsAgreeOnRandomKout) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const UndirectedGraph g(init_random_kout(700, 3, seed));
    const auto serial = diameter_serial(g);
    ASSERT_TRUE(serial.has_value());
    for (int threads : {1, 2}) {
      omp_set_num_threads(threads);
      EXPECT_EQ(diameter_bitparallel(g), serial);
    }
    const DiameterResult exact = undirected_diameter(g);
    EXPECT_TRUE(exact.exact());
    EXPECT_EQ(exact.lower, *serial);
    const DiameterResult bounds = undirected_diameter(g, 100);
    EXPECT_LE(bounds.lower, *serial);
    EXPECT_GE(bounds.upper, *serial);
  }
  omp_set_num_threads(omp_get_num_procs());
}

TEST(UndirectedGraph, DegreeSumIsTwoKn) {
  const FriendState s = init_random_kout(300, 4, 1);
  const UndirectedGraph g(s);
  EXPECT_EQ(g.degree_sum(), 2u * 4u * 300u);
  for (ItemId v = 0; v < 300; ++v) EXPECT_EQ(g.degree(v), 4u + s.cofriends(v).size());
}

TEST(DiameterExperiment, RefusesSmallKAndHandlesCompleteCase) {
  EXPECT_THROW(diameter_experiment(100, 2, 5, 0.5, 1), DomainError);
  const DiameterReport rep = diameter_experiment(5, 4, 3, 0.5, 1);
  EXPECT_EQ(rep.disconnected, 0u);
  for (std::size_t d : rep.diameters) EXPECT_EQ(d, 1u);
  EXPECT_DOUBLE_EQ(rep.fraction_within, 1.0);
}

TEST(DiameterExperiment, ReproducibleAndBounded) {
  const DiameterReport a = diameter_experiment(2000, 3, 5, 0.5, 9);
  const DiameterReport b = diameter_experiment(2000, 3, 5, 0.5, 9);
  EXPECT_EQ(a.diameters, b.diameters);
  EXPECT_NEAR(a.bound, 1.5 * std::log(2000.0) / std::log(2.0), 1e-12);
}

TEST(Expansion, SingletonsAndSizeFilter) {
  const std::size_t n = 1000;
  const KnnGraph g = init_random_kout(n, 6, 2).to_graph();
  // alpha = 2 ln n / n gives max_size 1: every singleton has exactly K out-neighbours.
  const ExpansionReport single = expansion_check(g, 2.0 * std::log(1000.0) / n, 1.0, 200, 3);
  EXPECT_EQ(single.max_size, 1u);
  EXPECT_EQ(single.violations, 0u);
  EXPECT_DOUBLE_EQ(single.min_ratio, 6.0);

  const ExpansionReport wide = expansion_check(g, 0.5, 1.0, 500, 3);
  EXPECT_EQ(wide.max_size, static_cast<std::size_t>(std::ceil(0.5 * n / std::log(1000.0))) - 1);
  EXPECT_LE(wide.min_ratio, 6.0);
  EXPECT_THROW(expansion_check(g, 1e-6, 1.0, 10, 3), InputError);
}

TEST(Expansion, ProofAlpha) {
  EXPECT_NEAR(expansion_proof_alpha(3, 1.0), std::exp(-(3.0 + 4.0 * std::log(4.0))), 1e-15);
  EXPECT_LT(expansion_proof_alpha(16, 1.0), 1e-5);
  EXPECT_THROW(expansion_proof_alpha(3, 0.0), InputError);
}
