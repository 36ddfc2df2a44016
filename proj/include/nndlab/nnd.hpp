#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nndlab/ranking.hpp"

namespace nndlab {

/// The evolving K-out friend digraph of NND.
///
/// friends(x) is rank ordered (most preferred first) once x has been updated
/// at least once; the random initialization is in sampling order.
/// cofriends(x) is always the exact transpose, sorted by id.
class FriendState {
 public:
  FriendState() = default;
  /// `friends` is row-major n*K. Throws InputError on a self-loop, duplicate
  /// or out-of-range id.
  FriendState(std::size_t n, std::size_t k, std::vector<ItemId> friends, std::size_t round = 0,
              std::uint64_t work = 0);

  std::size_t size() const noexcept { return n_; }
  std::size_t k() const noexcept { return k_; }
  std::size_t round() const noexcept { return round_; }
  std::uint64_t work() const noexcept { return work_; }

  std::span<const ItemId> friends(ItemId x) const noexcept {
    return {friends_.data() + x * k_, k_};
  }
  std::span<const ItemId> cofriends(ItemId x) const noexcept { return cofriends_[x]; }
  const std::vector<ItemId>& flat_friends() const noexcept { return friends_; }

  KnnGraph to_graph() const { return KnnGraph(n_, k_, friends_); }

  /// Number of vertices whose friend set (as a set) differs from `other`.
  std::size_t count_changed(const FriendState& other) const;

 private:
  friend void friend_barter(FriendState&, ItemId, ItemId, const RankingOracle&);
  friend void pointwise_pass(FriendState&, std::span<const ItemId>, const RankingOracle&);

  void rebuild_cofriends();

  std::size_t n_ = 0;
  std::size_t k_ = 0;
  std::size_t round_ = 0;
  std::uint64_t work_ = 0;
  std::vector<ItemId> friends_;
  std::vector<std::vector<ItemId>> cofriends_;
};

/// Each F_0(x) is an independent uniform K-subset of S \ {x}.
FriendState init_random_kout(std::size_t n, std::size_t k, std::uint64_t seed);

/// Reciprocal friend list requests between x and y, both computed from the
/// pre-barter sets.
void friend_barter(FriendState& state, ItemId x, ItemId y, const RankingOracle& oracle);

/// One simultaneous round: every F_{t+1}(x) is the top-K of
/// F(x) ∪ F(F(x)) [∪ C(x) ∪ F(C(x))] \ {x}, read from the round-t snapshot.
/// Parallel over vertices; the result does not depend on the thread count.
FriendState batch_round(const FriendState& state, const RankingOracle& oracle,
                        bool include_cofriends);

/// Single-threaded reference for batch_round.
FriendState batch_round_serial(const FriendState& state, const RankingOracle& oracle,
                               bool include_cofriends);

/// One scheduled pointwise pass; updates are visible to later visits.
/// Throws InputError when `schedule` is not a permutation of [0, n).
void pointwise_pass(FriendState& state, std::span<const ItemId> schedule,
                    const RankingOracle& oracle);

enum class NndMode { batch, pointwise };
enum class StopRule { no_change, budget };

std::string to_string(NndMode mode);
std::string to_string(StopRule rule);

/// ceil(2 log_K n), the default round budget.
std::size_t default_round_budget(std::size_t n, std::size_t k);

struct NndConfig {
  std::size_t k = 8;
  NndMode mode = NndMode::batch;
  std::uint64_t seed = 0;
  std::size_t max_rounds = 0;  // 0 selects default_round_budget
  StopRule stop = StopRule::no_change;
  bool include_cofriends = true;   // batch mode only
  bool shuffle_schedule = false;   // pointwise mode: seeded shuffle instead of identity
};

struct NndResult {
  KnnGraph graph;
  std::size_t rounds = 0;
  std::uint64_t comparisons = 0;
  bool converged = false;  // last executed round changed nothing
  std::vector<std::size_t> changes_per_round;
  std::vector<double> recall_per_round;  // filled when an exact graph is given
  std::optional<double> recall;
};

NndResult run_nnd(const RankingOracle& oracle, const NndConfig& config,
                  const KnnGraph* exact = nullptr);

}  // namespace nndlab
