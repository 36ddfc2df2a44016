#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace nndlab {

/// Dense identifier of a point of the ground set, in [0, n).
using ItemId = std::uint32_t;

/// Exact rank tables are test oracles; above this size only the oracle
/// interface is available.
inline constexpr std::size_t kDefaultRankTableCap = std::size_t{1} << 15;

/// Strict rankings r_x of S \ {x} for every x.
///
/// Stores both the rank values and the inverse permutation (the preference
/// order of each point) so rank lookups and ordered scans are O(1) per item.
class RankTable {
 public:
  RankTable() = default;

  /// Builds a table from preference orders: `orders[x]` lists S \ {x},
  /// most preferred first. Throws InputError when a list is not a
  /// permutation of S \ {x} or n exceeds `cap`.
  static RankTable from_orders(const std::vector<std::vector<ItemId>>& orders,
                               std::size_t cap = kDefaultRankTableCap);

  std::size_t size() const noexcept { return n_; }

  /// r_x(y) in [1, n-1]; x != y.
  std::uint32_t rank(ItemId x, ItemId y) const noexcept { return ranks_[x * n_ + y]; }

  /// Items ordered by x's preference: order(x)[k] = r_x^{-1}(k+1).
  std::span<const ItemId> order(ItemId x) const noexcept {
    return {orders_.data() + x * (n_ - 1), n_ - 1};
  }

  bool prefers(ItemId x, ItemId y, ItemId z) const noexcept { return rank(x, y) < rank(x, z); }

  bool operator==(const RankTable&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint32_t> ranks_;  // n*n, zero on the diagonal
  std::vector<ItemId> orders_;        // n*(n-1)
};

/// Comparison oracle: answers "does x prefer y to z" and meters every query.
///
/// The meter is atomic so concurrent readers (the batch NND kernel) may share
/// one oracle; the answers themselves are pure.
class RankingOracle {
 public:
  RankingOracle() = default;
  RankingOracle(const RankingOracle&) = delete;
  RankingOracle& operator=(const RankingOracle&) = delete;
  virtual ~RankingOracle() = default;

  virtual std::size_t size() const noexcept = 0;

  bool prefers(ItemId x, ItemId y, ItemId z) const {
    comparisons_.fetch_add(1, std::memory_order_relaxed);
    return less(x, y, z);
  }

  std::uint64_t comparison_count() const noexcept {
    return comparisons_.load(std::memory_order_relaxed);
  }
  void reset_count() noexcept { comparisons_.store(0, std::memory_order_relaxed); }

 protected:
  virtual bool less(ItemId x, ItemId y, ItemId z) const = 0;

 private:
  mutable std::atomic<std::uint64_t> comparisons_{0};
};

/// Oracle backed by an exact RankTable.
class TableOracle final : public RankingOracle {
 public:
  explicit TableOracle(std::shared_ptr<const RankTable> table) : table_(std::move(table)) {}
  std::size_t size() const noexcept override { return table_->size(); }
  const RankTable& table() const noexcept { return *table_; }

 protected:
  bool less(ItemId x, ItemId y, ItemId z) const override { return table_->prefers(x, y, z); }

 private:
  std::shared_ptr<const RankTable> table_;
};

using DistanceFn = std::function<double(ItemId, ItemId)>;

/// Oracle backed by a symmetric distance; equal distances fall back to
/// index order. Usable for any n (no O(n^2) table).
class DistanceOracle final : public RankingOracle {
 public:
  DistanceOracle(std::size_t n, DistanceFn distance) : n_(n), distance_(std::move(distance)) {}
  std::size_t size() const noexcept override { return n_; }

 protected:
  bool less(ItemId x, ItemId y, ItemId z) const override {
    const double dy = distance_(x, y);
    const double dz = distance_(x, z);
    return dy < dz || (dy == dz && y < z);
  }

 private:
  std::size_t n_;
  DistanceFn distance_;
};

/// Approximate or exact K-NN digraph; neighbor lists are rank ordered.
class KnnGraph {
 public:
  KnnGraph() = default;
  /// `neighbors` is row-major n*K. Throws InputError on a self-loop,
  /// a duplicate or an out-of-range id.
  KnnGraph(std::size_t n, std::size_t k, std::vector<ItemId> neighbors);

  std::size_t size() const noexcept { return n_; }
  std::size_t k() const noexcept { return k_; }
  std::span<const ItemId> neighbors(ItemId x) const noexcept {
    return {neighbors_.data() + x * k_, k_};
  }
  const std::vector<ItemId>& flat() const noexcept { return neighbors_; }

  bool operator==(const KnnGraph&) const = default;

 private:
  std::size_t n_ = 0;
  std::size_t k_ = 0;
  std::vector<ItemId> neighbors_;
};

/// Ranks each point's neighbors by increasing distance; equal distances are
/// ordered by position in `tie_order` (a permutation of [0,n), identity if
/// empty). Throws InputError on a non-finite or negative distance.
RankTable ranking_from_distances(std::size_t n, const DistanceFn& distance,
                                 std::span<const ItemId> tie_order = {},
                                 std::size_t cap = kDefaultRankTableCap);

/// Lexicographic variant: key(x, y) = (primary, secondary), smaller first.
using DistanceKeyFn = std::function<std::pair<double, double>(ItemId, ItemId)>;
RankTable ranking_from_keys(std::size_t n, const DistanceKeyFn& key,
                            std::span<const ItemId> tie_order = {},
                            std::size_t cap = kDefaultRankTableCap);

/// Arc x->y iff r_x(y) <= K. Requires 1 <= K < n.
KnnGraph exact_knn(const RankTable& table, std::size_t k);

/// Same graph computed through metered comparisons only.
KnnGraph exact_knn(const RankingOracle& oracle, std::size_t k);

/// (sum_x |approx(x) ∩ exact(x)|) / (nK).
double recall(const KnnGraph& approx, const KnnGraph& exact);

}  // namespace nndlab
