#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nndlab/nnd.hpp"
#include "nndlab/ranking.hpp"

namespace nndlab {

/// Underlying undirected multigraph of a K-out digraph: every arc x->y
/// contributes y to x's list and x to y's, so degree(x) = K + |C(x)| and
/// the degrees sum to 2Kn.
class UndirectedGraph {
 public:
  UndirectedGraph() = default;
  explicit UndirectedGraph(const KnnGraph& graph);
  explicit UndirectedGraph(const FriendState& state) : UndirectedGraph(state.to_graph()) {}
  /// From an explicit edge list over n vertices.
  UndirectedGraph(std::size_t n, std::span<const std::pair<ItemId, ItemId>> edges);

  std::size_t size() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::span<const ItemId> neighbors(ItemId v) const noexcept {
    return {targets_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
  }
  std::size_t degree(ItemId v) const noexcept { return offsets_[v + 1] - offsets_[v]; }
  std::size_t degree_sum() const noexcept { return targets_.size(); }

 private:
  void build(std::size_t n, std::span<const std::pair<ItemId, ItemId>> edges);

  std::vector<std::size_t> offsets_;
  std::vector<ItemId> targets_;
};

/// Hop distances from `source`; -1 for unreachable vertices.
std::vector<std::int32_t> bfs_distances(const UndirectedGraph& g, ItemId source);

/// Exact diameter or interval bounds; `connected` false means infinite.
struct DiameterResult {
  bool connected = true;
  std::size_t lower = 0;
  std::size_t upper = 0;
  bool exact() const noexcept { return connected && lower == upper; }
};

inline constexpr std::size_t kExactDiameterCutoff = 20000;

/// Exact all-source diameter for n <= cutoff (64-source bit-parallel BFS,
/// parallel over source batches); above it a two-sweep lower bound and a
/// 2*eccentricity upper bound.
DiameterResult undirected_diameter(const UndirectedGraph& g,
                                   std::size_t cutoff = kExactDiameterCutoff);

/// Exact diameter by one plain BFS per source; nullopt when disconnected.
std::optional<std::size_t> diameter_serial(const UndirectedGraph& g);

/// Exact diameter by bit-parallel BFS; nullopt when disconnected.
std::optional<std::size_t> diameter_bitparallel(const UndirectedGraph& g);

struct DiameterReport {
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t trials = 0;
  double epsilon = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> diameters;  // connected samples (upper end if inexact)
  std::size_t disconnected = 0;
  double bound = 0;  // (1 + eps) log_{K-1} n
  double fraction_within = 0;
};

/// Diameters of independent random K-out graphs. Throws DomainError for K < 3.
DiameterReport diameter_experiment(std::size_t n, std::size_t k, std::size_t trials,
                                   double epsilon, std::uint64_t seed);

struct ExpansionReport {
  double expansion_alpha = 0;
  double epsilon = 0;
  std::size_t max_size = 0;   // largest tested |X|, < alpha n / ln n
  std::size_t sample_sets = 0;
  std::size_t violations = 0; // sets with |N(X)| <= (K - 1 - eps)|X|
  double min_ratio = 0;       // min |N(X)| / |X| seen
  std::uint64_t seed = 0;
};

/// Random vertex sets X with 1 <= |X| < alpha n / ln n; N(X) is the set of
/// out-neighbours of X outside X.
ExpansionReport expansion_check(const KnnGraph& graph, double expansion_alpha, double epsilon,
                                std::size_t sample_sets, std::uint64_t seed);

/// The constant [e^{2+eps} (K+1)^{2+2eps}]^{-1/eps} from the existence proof.
double expansion_proof_alpha(std::size_t k, double epsilon);

}  // namespace nndlab
