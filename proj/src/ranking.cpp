#include "nndlab/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nndlab/error.hpp"

namespace nndlab {

RankTable RankTable::from_orders(const std::vector<std::vector<ItemId>>& orders,
                                 std::size_t cap) {
  const std::size_t n = orders.size();
  if (n < 2) throw InputError("ranking system needs at least two points");
  if (n > cap) {
    throw InputError("rank table for n=" + std::to_string(n) + " exceeds cap " +
                     std::to_string(cap) + "; use an oracle instead");
  }
  RankTable t;
  t.n_ = n;
  t.ranks_.assign(n * n, 0);
  t.orders_.resize(n * (n - 1));
  for (ItemId x = 0; x < n; ++x) {
    const auto& list = orders[x];
    if (list.size() != n - 1) {
      throw InputError("order of point " + std::to_string(x) + " has wrong length");
    }
    for (std::size_t k = 0; k < list.size(); ++k) {
      const ItemId y = list[k];
      if (y >= n || y == x || t.ranks_[x * n + y] != 0) {
        throw InputError("order of point " + std::to_string(x) +
                         " is not a permutation of the other points");
      }
      t.ranks_[x * n + y] = static_cast<std::uint32_t>(k + 1);
      t.orders_[x * (n - 1) + k] = y;
    }
  }
  return t;
}

KnnGraph::KnnGraph(std::size_t n, std::size_t k, std::vector<ItemId> neighbors)
    : n_(n), k_(k), neighbors_(std::move(neighbors)) {
  if (neighbors_.size() != n * k) throw InputError("neighbor array must hold n*K entries");
  std::vector<ItemId> row;
  for (ItemId x = 0; x < n; ++x) {
    row.assign(neighbors_.begin() + x * k, neighbors_.begin() + (x + 1) * k);
    std::sort(row.begin(), row.end());
    if (std::adjacent_find(row.begin(), row.end()) != row.end()) {
      throw InputError("duplicate neighbor of point " + std::to_string(x));
    }
    for (ItemId y : row) {
      if (y >= n || y == x) throw InputError("invalid neighbor of point " + std::to_string(x));
    }
  }
}

namespace {

std::vector<std::uint32_t> tie_priority(std::size_t n, std::span<const ItemId> tie_order) {
  std::vector<std::uint32_t> priority(n);
  if (tie_order.empty()) {
    std::iota(priority.begin(), priority.end(), 0u);
    return priority;
  }
  if (tie_order.size() != n) throw InputError("tie order must be a permutation of the items");
  std::vector<bool> seen(n, false);
  for (std::size_t pos = 0; pos < n; ++pos) {
    const ItemId id = tie_order[pos];
    if (id >= n || seen[id]) throw InputError("tie order must be a permutation of the items");
    seen[id] = true;
    priority[id] = static_cast<std::uint32_t>(pos);
  }
  return priority;
}

}  // namespace

RankTable ranking_from_keys(std::size_t n, const DistanceKeyFn& key,
                            std::span<const ItemId> tie_order, std::size_t cap) {
  if (n > cap) throw InputError("rank table exceeds cap; use an oracle instead");
  const auto priority = tie_priority(n, tie_order);
  std::vector<std::vector<ItemId>> orders(n);
  struct Entry {
    double primary;
    double secondary;
    std::uint32_t priority;
    ItemId id;
  };
  std::vector<Entry> entries;
  for (ItemId x = 0; x < n; ++x) {
    entries.clear();
    for (ItemId y = 0; y < n; ++y) {
      if (y == x) continue;
      const auto [primary, secondary] = key(x, y);
      if (!std::isfinite(primary) || !std::isfinite(secondary) || primary < 0.0) {
        throw InputError("distance between " + std::to_string(x) + " and " + std::to_string(y) +
                         " is not a finite non-negative number");
      }
      entries.push_back({primary, secondary, priority[y], y});
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
      if (a.primary != b.primary) return a.primary < b.primary;
      if (a.secondary != b.secondary) return a.secondary < b.secondary;
      return a.priority < b.priority;
    });
    orders[x].reserve(n - 1);
    for (const auto& e : entries) orders[x].push_back(e.id);
  }
  return RankTable::from_orders(orders, cap);
}

RankTable ranking_from_distances(std::size_t n, const DistanceFn& distance,
                                 std::span<const ItemId> tie_order, std::size_t cap) {
  return ranking_from_keys(
      n, [&](ItemId x, ItemId y) { return std::pair{distance(x, y), 0.0}; }, tie_order, cap);
}

KnnGraph exact_knn(const RankTable& table, std::size_t k) {
  const std::size_t n = table.size();
  if (k < 1 || k >= n) throw InputError("exact_knn requires 1 <= K < n");
  std::vector<ItemId> flat;
  flat.reserve(n * k);
  for (ItemId x = 0; x < n; ++x) {
    const auto order = table.order(x);
    flat.insert(flat.end(), order.begin(), order.begin() + k);
  }
  return KnnGraph(n, k, std::move(flat));
}

KnnGraph exact_knn(const RankingOracle& oracle, std::size_t k) {
  const std::size_t n = oracle.size();
  if (k < 1 || k >= n) throw InputError("exact_knn requires 1 <= K < n");
  std::vector<ItemId> flat;
  flat.reserve(n * k);
  std::vector<ItemId> others;
  for (ItemId x = 0; x < n; ++x) {
    others.clear();
    for (ItemId y = 0; y < n; ++y) {
      if (y != x) others.push_back(y);
    }
    std::partial_sort(others.begin(), others.begin() + k, others.end(),
                      [&](ItemId a, ItemId b) { return oracle.prefers(x, a, b); });
    flat.insert(flat.end(), others.begin(), others.begin() + k);
  }
  return KnnGraph(n, k, std::move(flat));
}

double recall(const KnnGraph& approx, const KnnGraph& exact) {
  if (approx.size() != exact.size() || approx.k() != exact.k()) {
    throw InputError("recall needs graphs with the same n and K");
  }
  const std::size_t n = exact.size();
  const std::size_t k = exact.k();
  if (n == 0 || k == 0) throw InputError("recall of an empty graph is undefined");
  std::size_t hits = 0;
  std::vector<ItemId> a, e;
  for (ItemId x = 0; x < n; ++x) {
    const auto an = approx.neighbors(x);
    const auto en = exact.neighbors(x);
    a.assign(an.begin(), an.end());
    e.assign(en.begin(), en.end());
    std::sort(a.begin(), a.end());
    std::sort(e.begin(), e.end());
    std::vector<ItemId> common;
    std::set_intersection(a.begin(), a.end(), e.begin(), e.end(), std::back_inserter(common));
    hits += common.size();
  }
  return static_cast<double>(hits) / static_cast<double>(n * k);
}

}  // namespace nndlab
