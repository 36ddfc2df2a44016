#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <set>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <omp.h>

#include "nndlab/crs.hpp"
#include "nndlab/error.hpp"
#include "nndlab/nnd.hpp"
#include "nndlab/spaces.hpp"

using namespace nndlab;

namespace {

std::shared_ptr<const RankTable> paris_table(std::size_t n) {
  const ParisSpace s = paris_arithmetic(n);
  return std::make_shared<const RankTable>(
      ranking_from_distances(n, [&](ItemId i, ItemId j) { return paris_distance(s, i, j); }));
}

std::shared_ptr<const RankTable> circle_table(std::size_t n, std::uint64_t seed) {
  const CircleSpace s = circle_sample(static_cast<double>(n), seed, false);
  return std::make_shared<const RankTable>(
      ranking_from_distances(n, [&](ItemId i, ItemId j) { return circle_distance(s, i, j); }));
}

std::set<ItemId> as_set(std::span<const ItemId> s) { return {s.begin(), s.end()}; }

void expect_transpose(const FriendState& s) {
  std::vector<std::vector<ItemId>> want(s.size());
  for (ItemId u = 0; u < s.size(); ++u) {
    for (ItemId x : s.friends(u)) want[x].push_back(u);
  }
  for (ItemId x = 0; x < s.size(); ++x) {
    std::vector<ItemId> got(s.cofriends(x).begin(), s.cofriends(x).end());
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, want[x]);
  }
}

std::uint32_t worst_rank(const RankTable& t, const FriendState& s, ItemId x) {
  std::uint32_t worst = 0;
  for (ItemId y : s.friends(x)) worst = std::max(worst, t.rank(x, y));
  return worst;
}

}  // namespace

TEST(InitRandomKout, ForcedWhenNIsKPlusOne) {
  const FriendState s = init_random_kout(6, 5, 3);
  for (ItemId x = 0; x < 6; ++x) EXPECT_EQ(as_set(s.friends(x)).size(), 5u);
  expect_transpose(s);
  EXPECT_THROW(init_random_kout(5, 5, 0), InputError);
}

TEST(InitRandomKout, CofriendCountsAreBinomial) {
  const std::size_t n = 10000, k = 16;
  const FriendState s = init_random_kout(n, k, 17);
  std::size_t total = 0;
  std::map<std::size_t, std::size_t> observed;
  for (ItemId x = 0; x < n; ++x) {
    total += s.cofriends(x).size();
    ++observed[s.cofriends(x).size()];
  }
  EXPECT_EQ(total, n * k);

  // Chi-square goodness of fit with bins merged until each expects >= 5.
  const boost::math::binomial_distribution<double> law(n - 1, static_cast<double>(k) / (n - 1));
  double chi2 = 0, exp_acc = 0, obs_acc = 0;
  int bins = 0;
  const std::size_t top = observed.rbegin()->first;
  for (std::size_t c = 0; c <= top + 1; ++c) {
    const bool last = c == top + 1;
    exp_acc += last ? n * boost::math::cdf(boost::math::complement(law, static_cast<double>(top)))
                    : n * boost::math::pdf(law, static_cast<double>(c));
    obs_acc += last ? 0 : (observed.count(c) ? observed[c] : 0);
    if (exp_acc >= 5.0 || last) {
      chi2 += (obs_acc - exp_acc) * (obs_acc - exp_acc) / exp_acc;
      exp_acc = obs_acc = 0;
      ++bins;
    }
  }
  const boost::math::chi_squared_distribution<double> ref(bins - 1);
  EXPECT_LT(chi2, boost::math::quantile(ref, 0.99));
}

TEST(FriendBarter, ParisExample) {
  // Points x_1..x_8 are ids 0..7; x = x_3 knows {x_7, x_8}, y = x_4 knows {x_1, x_5}.
  auto table = paris_table(8);
  const TableOracle oracle(table);
  std::vector<ItemId> flat{1, 2, 0, 2, 6, 7, 0, 4, 0, 1, 0, 1, 0, 1, 0, 1};
  FriendState s(8, 2, flat);
  friend_barter(s, 2, 3, oracle);
  EXPECT_EQ(as_set(s.friends(2)), (std::set<ItemId>{0, 4}));
  EXPECT_EQ(as_set(s.friends(3)), (std::set<ItemId>{0, 4}));
  expect_transpose(s);

  const auto before = s.flat_friends();
  friend_barter(s, 2, 3, oracle);
  EXPECT_EQ(s.flat_friends(), before);
  EXPECT_THROW(friend_barter(s, 2, 2, oracle), InputError);
}

TEST(FriendBarter, NoNewCandidatesLeavesSetUnchanged) {
  auto table = circle_table(10, 2);
  const TableOracle oracle(table);
  // F(6) = {0, 3} adds nothing to F(0) = {3, 5} besides 0 itself.
  std::vector<ItemId> flat(20);
  for (ItemId v = 0; v < 10; ++v) {
    flat[2 * v] = (v + 1) % 10;
    flat[2 * v + 1] = (v + 2) % 10;
  }
  flat[0] = 3;
  flat[1] = 5;  // F(0) = {3, 5}
  flat[12] = 0;
  flat[13] = 3;  // F(6) = {0, 3}
  FriendState s(10, 2, flat);
  friend_barter(s, 0, 6, oracle);
  EXPECT_EQ(as_set(s.friends(0)), (std::set<ItemId>{3, 5}));
}

TEST(BatchRound, ExactGraphIsAFixedPoint) {
  auto table = paris_table(64);
  const TableOracle oracle(table);
  const KnnGraph exact = exact_knn(*table, 4);
  const FriendState s(64, 4, exact.flat());
  const FriendState next = batch_round(s, oracle, true);
  EXPECT_EQ(next.count_changed(s), 0u);
  EXPECT_EQ(next.round(), 1u);
}

TEST(BatchRound, NoOpWhenComplete) {
  auto table = circle_table(7, 1);
  const TableOracle oracle(table);
  const FriendState s = init_random_kout(7, 6, 4);
  EXPECT_EQ(batch_round(s, oracle, true).count_changed(s), 0u);
  FriendState p = s;
  const std::vector<ItemId> schedule{6, 5, 4, 3, 2, 1, 0};
  pointwise_pass(p, schedule, oracle);
  EXPECT_EQ(p.count_changed(s), 0u);
}

TEST(BatchRound, ParallelMatchesSerialForAnyThreadCount) {
  auto table = circle_table(1500, 8);
  const TableOracle oracle(table);
  FriendState s = init_random_kout(1500, 6, 9);
  for (int round = 0; round < 3; ++round) {
    const FriendState ref = batch_round_serial(s, oracle, true);
    for (int threads : {1, 2, 4}) {
      omp_set_num_threads(threads);
      const FriendState par = batch_round(s, oracle, true);
      EXPECT_EQ(par.flat_friends(), ref.flat_friends());
      EXPECT_EQ(par.work(), ref.work());
    }
    s = ref;
  }
  omp_set_num_threads(omp_get_num_procs());
}

TEST(BatchRound, TransposeMonotoneQualityAndWorkBound) {
  const std::size_t n = 800, k = 6;
  auto table = circle_table(n, 12);
  const TableOracle oracle(table);
  FriendState s = init_random_kout(n, k, 13);
  const double per_round_bound =
      2.0 * n * k * k * std::ceil(std::log2(static_cast<double>(k * k + k)));
  for (int round = 0; round < 5; ++round) {
    const FriendState next = batch_round(s, oracle, false);
    expect_transpose(next);
    for (ItemId x = 0; x < n; ++x) EXPECT_LE(worst_rank(*table, next, x), worst_rank(*table, s, x));
    EXPECT_LE(static_cast<double>(next.work() - s.work()), per_round_bound);
    EXPECT_GE(next.work(), s.work());
    s = next;
  }
}

namespace {

/// Independent reference pass: recomputes each candidate pool from scratch
/// with a full sort by rank and records the pool sizes.
FriendState reference_pass(const FriendState& s, const RankTable& t,
                           std::span<const ItemId> schedule, std::vector<std::size_t>& pool_sizes) {
  const std::size_t k = s.k();
  std::vector<ItemId> flat = s.flat_friends();
  for (ItemId x : schedule) {
    std::set<ItemId> pool;
    for (std::size_t i = 0; i < k; ++i) {
      const ItemId y = flat[x * k + i];
      pool.insert(y);
      for (std::size_t j = 0; j < k; ++j) pool.insert(flat[y * k + j]);
    }
    pool.erase(x);
    pool_sizes.push_back(pool.size());
    std::vector<ItemId> c(pool.begin(), pool.end());
    std::sort(c.begin(), c.end(), [&](ItemId a, ItemId b) { return t.rank(x, a) < t.rank(x, b); });
    std::copy_n(c.begin(), k, flat.begin() + x * k);
  }
  return FriendState(s.size(), k, flat);
}

}  // namespace

TEST(PointwisePass, MatchesReferenceOnGenericCrs) {
  const std::size_t n = 128, k = 8;
  const Crs crs = generic_crs(n, 21);
  auto table = std::make_shared<const RankTable>(crs.table);
  const TableOracle oracle(table);
  FriendState s = init_random_kout(n, k, 22);
  std::vector<ItemId> schedule(n);
  std::iota(schedule.begin(), schedule.end(), ItemId{0});
  std::vector<std::size_t> pools;
  const FriendState ref = reference_pass(s, *table, schedule, pools);
  pointwise_pass(s, schedule, oracle);
  EXPECT_EQ(s.flat_friends(), ref.flat_friends());
  for (std::size_t p : pools) EXPECT_LE(p, k * k + k);
  expect_transpose(s);
}

TEST(PointwisePass, RejectsNonPermutation) {
  auto table = paris_table(5);
  const TableOracle oracle(table);
  FriendState s = init_random_kout(5, 2, 1);
  const std::vector<ItemId> bad{0, 1, 1, 3, 4};
  EXPECT_THROW(pointwise_pass(s, bad, oracle), InputError);
  const std::vector<ItemId> short_schedule{0, 1};
  EXPECT_THROW(pointwise_pass(s, short_schedule, oracle), InputError);
}

TEST(PointwisePass, ParisRecallDoesNotDecrease) {
  auto table = paris_table(100);
  const TableOracle oracle(table);
  const KnnGraph exact = exact_knn(*table, 4);
  FriendState s = init_random_kout(100, 4, 5);
  std::vector<ItemId> schedule(100);
  std::iota(schedule.begin(), schedule.end(), ItemId{0});
  double prev = recall(s.to_graph(), exact);
  for (int pass = 0; pass < 3; ++pass) {
    pointwise_pass(s, schedule, oracle);
    const double now = recall(s.to_graph(), exact);
    EXPECT_GE(now, prev);
    prev = now;
  }
}

TEST(RunNnd, CompleteCaseConvergesInOneRound) {
  auto table = paris_table(9);
  const TableOracle oracle(table);
  const KnnGraph exact = exact_knn(*table, 8);
  NndConfig cfg;
  cfg.k = 8;
  const NndResult r = run_nnd(oracle, cfg, &exact);
  EXPECT_EQ(r.rounds, 1u);
  EXPECT_TRUE(r.converged);
  EXPECT_DOUBLE_EQ(*r.recall, 1.0);
}

TEST(RunNnd, RandomRankingSystemStaysPoor) {
  auto table = std::make_shared<const RankTable>(random_ranking_table({512, 3}));
  const TableOracle oracle(table);
  const KnnGraph exact = exact_knn(*table, 8);
  NndConfig cfg;
  cfg.k = 8;
  cfg.seed = 3;
  cfg.stop = StopRule::budget;
  const NndResult r = run_nnd(oracle, cfg, &exact);
  EXPECT_EQ(r.rounds, default_round_budget(512, 8));
  EXPECT_LT(*r.recall, 0.2);
}

TEST(RunNnd, DeterministicForSeedAndMode) {
  auto table = circle_table(400, 4);
  const KnnGraph exact = exact_knn(*table, 5);
  for (NndMode mode : {NndMode::batch, NndMode::pointwise}) {
    NndConfig cfg;
    cfg.k = 5;
    cfg.mode = mode;
    cfg.seed = 77;
    cfg.shuffle_schedule = true;
    const TableOracle a(table), b(table);
    const NndResult ra = run_nnd(a, cfg, &exact);
    const NndResult rb = run_nnd(b, cfg, &exact);
    EXPECT_EQ(ra.graph, rb.graph);
    EXPECT_EQ(ra.comparisons, rb.comparisons);
    EXPECT_EQ(ra.changes_per_round, rb.changes_per_round);
  }
}

TEST(RunNnd, DefaultBudget) {
  EXPECT_EQ(default_round_budget(2048, 8), 8u);  // ceil(2 * 11/3)
  EXPECT_EQ(default_round_budget(1000, 10), 6u);
  EXPECT_EQ(default_round_budget(512, 8), 6u);
}
