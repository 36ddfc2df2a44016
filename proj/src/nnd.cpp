#include "nndlab/nnd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <omp.h>

#include "nndlab/error.hpp"
#include "nndlab/rng.hpp"

namespace nndlab {

FriendState::FriendState(std::size_t n, std::size_t k, std::vector<ItemId> friends,
                         std::size_t round, std::uint64_t work)
    : n_(n), k_(k), round_(round), work_(work), friends_(std::move(friends)) {
  if (k < 1 || k >= n) throw InputError("friend state requires 1 <= K < n");
  // Reuse KnnGraph's row validation.
  (void)KnnGraph(n, k, friends_);
  rebuild_cofriends();
}

void FriendState::rebuild_cofriends() {
  cofriends_.assign(n_, {});
  for (ItemId u = 0; u < n_; ++u) {
    for (ItemId x : friends(u)) cofriends_[x].push_back(u);
  }
}

std::size_t FriendState::count_changed(const FriendState& other) const {
  if (other.n_ != n_ || other.k_ != k_) throw InputError("states differ in n or K");
  std::size_t changed = 0;
  std::vector<ItemId> a, b;
  for (ItemId x = 0; x < n_; ++x) {
    const auto fa = friends(x);
    const auto fb = other.friends(x);
    a.assign(fa.begin(), fa.end());
    b.assign(fb.begin(), fb.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) ++changed;
  }
  return changed;
}

FriendState init_random_kout(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 1 || k >= n) throw InputError("random K-out initialization requires 1 <= K < n");
  Rng rng = make_rng(seed, 0x6b6f7574);
  std::vector<ItemId> flat;
  flat.reserve(n * k);
  const std::size_t pool = n - 1;  // S \ {x}, relabelled to [0, n-1)
  std::vector<ItemId> chosen;
  for (ItemId x = 0; x < n; ++x) {
    // Floyd's sampling of a uniform k-subset of [0, pool).
    chosen.clear();
    for (std::size_t j = pool - k; j < pool; ++j) {
      const auto t = static_cast<ItemId>(uniform_index<std::size_t>(rng, j + 1));
      const bool taken = std::find(chosen.begin(), chosen.end(), t) != chosen.end();
      chosen.push_back(taken ? static_cast<ItemId>(j) : t);
    }
    for (ItemId v : chosen) flat.push_back(v >= x ? v + 1 : v);
  }
  return FriendState(n, k, std::move(flat));
}

namespace {

/// Replaces `out` with the K most preferred distinct candidates (x excluded),
/// most preferred first. `candidates` is scratch and gets reordered.
std::uint64_t select_top_k(ItemId x, std::vector<ItemId>& candidates, std::size_t k,
                           const RankingOracle& oracle, ItemId* out) {
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  candidates.erase(std::remove(candidates.begin(), candidates.end(), x), candidates.end());
  if (candidates.size() < k) throw InvariantViolation("candidate pool smaller than K");
  std::uint64_t comparisons = 0;
  std::partial_sort(candidates.begin(), candidates.begin() + k, candidates.end(),
                    [&](ItemId a, ItemId b) {
                      ++comparisons;
                      return oracle.prefers(x, a, b);
                    });
  std::copy_n(candidates.begin(), k, out);
  return comparisons;
}

void gather_batch_candidates(const FriendState& state, ItemId x, bool include_cofriends,
                             std::vector<ItemId>& candidates) {
  candidates.clear();
  for (ItemId y : state.friends(x)) {
    candidates.push_back(y);
    const auto fy = state.friends(y);
    candidates.insert(candidates.end(), fy.begin(), fy.end());
  }
  if (!include_cofriends) return;
  for (ItemId y : state.cofriends(x)) {
    candidates.push_back(y);
    const auto fy = state.friends(y);
    candidates.insert(candidates.end(), fy.begin(), fy.end());
  }
}

}  // namespace

void friend_barter(FriendState& state, ItemId x, ItemId y, const RankingOracle& oracle) {
  const std::size_t n = state.size();
  const std::size_t k = state.k();
  if (x >= n || y >= n) throw InputError("barter participant out of range");
  if (x == y) throw InputError("a point cannot barter with itself");
  std::vector<ItemId> pool;
  pool.reserve(2 * k);
  const auto fx = state.friends(x);
  const auto fy = state.friends(y);
  pool.assign(fx.begin(), fx.end());
  pool.insert(pool.end(), fy.begin(), fy.end());
  std::vector<ItemId> pool_y = pool;

  std::vector<ItemId> new_x(k), new_y(k);
  std::uint64_t work = select_top_k(x, pool, k, oracle, new_x.data());
  work += select_top_k(y, pool_y, k, oracle, new_y.data());

  std::copy(new_x.begin(), new_x.end(), state.friends_.begin() + x * k);
  std::copy(new_y.begin(), new_y.end(), state.friends_.begin() + y * k);
  state.work_ += work;
  state.rebuild_cofriends();
}

FriendState batch_round_serial(const FriendState& state, const RankingOracle& oracle,
                               bool include_cofriends) {
  const std::size_t n = state.size();
  const std::size_t k = state.k();
  std::vector<ItemId> next(n * k);
  std::vector<ItemId> candidates;
  std::uint64_t work = 0;
  for (ItemId x = 0; x < n; ++x) {
    gather_batch_candidates(state, x, include_cofriends, candidates);
    work += select_top_k(x, candidates, k, oracle, next.data() + x * k);
  }
  return FriendState(n, k, std::move(next), state.round() + 1, state.work() + work);
}

FriendState batch_round(const FriendState& state, const RankingOracle& oracle,
                        bool include_cofriends) {
  const std::size_t n = state.size();
  const std::size_t k = state.k();
  std::vector<ItemId> next(n * k);
  std::uint64_t work = 0;
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel reduction(+ : work)
  {
    std::vector<ItemId> candidates;
#pragma omp for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < count; ++i) {
      const auto x = static_cast<ItemId>(i);
      gather_batch_candidates(state, x, include_cofriends, candidates);
      work += select_top_k(x, candidates, k, oracle, next.data() + x * k);
    }
  }
  return FriendState(n, k, std::move(next), state.round() + 1, state.work() + work);
}

void pointwise_pass(FriendState& state, std::span<const ItemId> schedule,
                    const RankingOracle& oracle) {
  const std::size_t n = state.size();
  const std::size_t k = state.k();
  if (schedule.size() != n) throw InputError("schedule must be a permutation of the points");
  std::vector<bool> seen(n, false);
  for (ItemId x : schedule) {
    if (x >= n || seen[x]) throw InputError("schedule must be a permutation of the points");
    seen[x] = true;
  }
  std::vector<ItemId> candidates;
  std::uint64_t work = 0;
  for (ItemId x : schedule) {
    candidates.clear();
    for (ItemId y : state.friends(x)) {
      candidates.push_back(y);
      const auto fy = state.friends(y);
      candidates.insert(candidates.end(), fy.begin(), fy.end());
    }
    work += select_top_k(x, candidates, k, oracle, state.friends_.data() + x * k);
  }
  state.work_ += work;
  ++state.round_;
  state.rebuild_cofriends();
}

std::string to_string(NndMode mode) { return mode == NndMode::batch ? "batch" : "pointwise"; }

std::string to_string(StopRule rule) {
  return rule == StopRule::no_change ? "no_change" : "budget";
}

std::size_t default_round_budget(std::size_t n, std::size_t k) {
  if (k < 2) return n;
  // The slack keeps exact powers such as log_8 512 from rounding up.
  const double rounds = std::ceil(2.0 * std::log(static_cast<double>(n)) /
                                      std::log(static_cast<double>(k)) -
                                  1e-9);
  return std::max<std::size_t>(1, static_cast<std::size_t>(rounds));
}

NndResult run_nnd(const RankingOracle& oracle, const NndConfig& config, const KnnGraph* exact) {
  const std::size_t n = oracle.size();
  if (exact && (exact->size() != n || exact->k() != config.k)) {
    throw InputError("exact graph does not match n and K");
  }
  const std::size_t budget =
      config.max_rounds > 0 ? config.max_rounds : default_round_budget(n, config.k);

  FriendState state = init_random_kout(n, config.k, config.seed);
  std::vector<ItemId> schedule(n);
  for (ItemId x = 0; x < n; ++x) schedule[x] = x;
  if (config.shuffle_schedule) {
    Rng rng = make_rng(config.seed, 0x73636864);
    for (std::size_t i = n; i > 1; --i) std::swap(schedule[i - 1], schedule[uniform_index(rng, i)]);
  }

  NndResult result;
  for (std::size_t round = 0; round < budget; ++round) {
    FriendState next = state;
    if (config.mode == NndMode::batch) {
      next = batch_round(state, oracle, config.include_cofriends);
    } else {
      pointwise_pass(next, schedule, oracle);
    }
    const std::size_t changed = next.count_changed(state);
    state = std::move(next);
    result.changes_per_round.push_back(changed);
    ++result.rounds;
    if (exact) result.recall_per_round.push_back(recall(state.to_graph(), *exact));
    result.converged = changed == 0;
    if (result.converged && config.stop == StopRule::no_change) break;
  }
  result.graph = state.to_graph();
  result.comparisons = state.work();
  if (exact) result.recall = recall(result.graph, *exact);
  return result;
}

}  // namespace nndlab
