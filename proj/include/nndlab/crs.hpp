#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nndlab/error.hpp"
#include "nndlab/ranking.hpp"

namespace nndlab {

/// Index of an unordered point pair under the lexicographic triangular
/// encoding: {i, j}, i < j, maps to i*n - i*(i+1)/2 + (j - i - 1).
using PairIndex = std::uint32_t;

struct Pair {
  ItemId lo = 0;
  ItemId hi = 0;
  bool operator==(const Pair&) const = default;
  bool disjoint(const Pair& o) const noexcept {
    return lo != o.lo && lo != o.hi && hi != o.lo && hi != o.hi;
  }
};

class PairCodec {
 public:
  explicit PairCodec(std::size_t n);
  std::size_t points() const noexcept { return n_; }
  std::size_t pairs() const noexcept { return pairs_.size(); }
  PairIndex encode(ItemId a, ItemId b) const;
  Pair decode(PairIndex id) const { return pairs_.at(id); }

 private:
  std::size_t n_;
  std::vector<Pair> pairs_;
};

/// A linear order on the N = n(n-1)/2 point pairs, stored bottom-up:
/// sequence()[k] is the pair with sigma = k + 1.
class LinearOrder {
 public:
  LinearOrder() = default;
  /// Throws InputError when `sequence` is not a permutation of [0, N).
  static LinearOrder from_sequence(std::size_t n, std::vector<PairIndex> sequence);
  static LinearOrder from_pairs(std::size_t n, const std::vector<Pair>& pairs);

  std::size_t points() const noexcept { return n_; }
  std::size_t pairs() const noexcept { return sequence_.size(); }
  std::span<const PairIndex> sequence() const noexcept { return sequence_; }
  /// 1-based position of a pair.
  std::uint32_t sigma(PairIndex p) const { return sigma_.at(p); }
  /// Pair at 1-based position.
  PairIndex at(std::size_t position) const { return sequence_.at(position - 1); }
  /// The order with positions pos and pos+1 (1-based) exchanged.
  LinearOrder swapped(std::size_t pos) const;

  bool operator==(const LinearOrder& o) const { return n_ == o.n_ && sequence_ == o.sequence_; }

 private:
  std::size_t n_ = 0;
  std::vector<PairIndex> sequence_;
  std::vector<std::uint32_t> sigma_;
};

/// Covering digraph of the order type: one arc per consecutive pair of every
/// per-point order. Reachability is computed on demand.
class OrderDag {
 public:
  OrderDag() = default;
  OrderDag(std::size_t nodes, std::vector<std::pair<PairIndex, PairIndex>> edges);

  std::size_t nodes() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  const std::vector<std::pair<PairIndex, PairIndex>>& edges() const noexcept { return edges_; }
  std::span<const PairIndex> successors(PairIndex p) const noexcept {
    return {targets_.data() + offsets_[p], offsets_[p + 1] - offsets_[p]};
  }
  /// a ≼_S b (reflexive-transitive closure).
  bool reaches(PairIndex a, PairIndex b) const;

 private:
  std::vector<std::pair<PairIndex, PairIndex>> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<PairIndex> targets_;
};

/// Directed cycle p_0 -> p_1 -> ... -> p_{k-1} -> p_0 in the consecutive
/// relation; proves the ranking system is not concordant.
struct CycleWitness {
  std::vector<PairIndex> cycle;
};

class NotConcordantError : public DomainError {
 public:
  explicit NotConcordantError(CycleWitness witness)
      : DomainError("ranking system is not concordant"), witness_(std::move(witness)) {}
  const CycleWitness& witness() const noexcept { return witness_; }

 private:
  CycleWitness witness_;
};

/// A ranking system with its concordancy certificate.
struct Crs {
  RankTable table;
  std::variant<OrderDag, CycleWitness> certificate;

  bool concordant() const noexcept { return std::holds_alternative<OrderDag>(certificate); }
  const OrderDag& dag() const { return std::get<OrderDag>(certificate); }
  const CycleWitness& cycle() const { return std::get<CycleWitness>(certificate); }
};

/// n x N embedding into l_inf^N; column c holds coordinate sigma = c + 1.
struct EmbeddingMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> coords;  // row-major

  double at(std::size_t row, std::size_t col) const { return coords[row * cols + col]; }
  double& at(std::size_t row, std::size_t col) { return coords[row * cols + col]; }
};

/// Rankings read off a linear order: r_x(y) = |{z : xz ≼ xy}|.
Crs phi(const LinearOrder& order);

/// Builds the consecutive-relation digraph and returns either the DAG or a
/// directed cycle.
Crs concordancy_check(const RankTable& table);

/// Embedding from the proof of concordant => metrizable, using a seeded
/// topological sort as the linear extension and index order on points.
/// Throws NotConcordantError for a non-concordant input.
EmbeddingMatrix linf_embed(const Crs& crs, std::uint64_t seed);

/// Same construction with an explicit linear extension and point order
/// (`point_order` empty means index order). Throws InputError if
/// `extension` does not extend the order type.
EmbeddingMatrix linf_embed(const Crs& crs, const LinearOrder& extension,
                           std::span<const ItemId> point_order = {});

/// Seeded linear extension of the order type (Kahn with random tie keys).
LinearOrder linear_extension(const Crs& crs, std::uint64_t seed);

double sup_distance(const EmbeddingMatrix& emb, ItemId x, ItemId y);

/// True iff the sup-norm rankings of the rows equal crs.table.
bool verify_embedding(const Crs& crs, const EmbeddingMatrix& emb);

/// True iff the pairs at 1-based positions pos, pos+1 are disjoint.
bool swap_is_white(const LinearOrder& order, std::size_t pos);

/// No incident edge of the equivalent-metrics graph is white.
bool is_isolated(const LinearOrder& order);

struct WhiteComponent {
  std::vector<LinearOrder> members;
  bool partial = false;  // exploration stopped at the cap
};

/// Breadth-first search over white edges starting at `order`.
WhiteComponent white_component(const LinearOrder& order, std::size_t cap);

/// Pairs of {2^0 .. 2^(n-1)} ordered by |2^i - 2^j|. Requires n >= 3.
LinearOrder powers_of_two_order(std::size_t n);

/// Round-robin 1-factorization of K_n, matchings concatenated. Requires even n >= 4.
LinearOrder baranyai_order(std::size_t n);

/// The perfect matchings used by baranyai_order, in order.
std::vector<std::vector<Pair>> round_robin_matchings(std::size_t n);

/// Edges of K_n in Hierholzer Eulerian-circuit order. Requires odd n >= 3.
LinearOrder eulerian_order(std::size_t n);

struct WhiteEdgeFraction {
  std::uint64_t numerator = 0;    // reduced
  std::uint64_t denominator = 1;  // reduced
  double exact = 0;
  double empirical = 0;
  std::size_t samples = 0;
};

/// Exact C(n-2,2)/(C(n,2)-1) and a Monte Carlo estimate over uniformly
/// random orders and positions.
WhiteEdgeFraction white_edge_fraction(std::size_t n, std::size_t samples, std::uint64_t seed);

struct CrsCensus {
  std::size_t n = 0;
  std::size_t pairs = 0;
  std::uint64_t orders = 0;            // |L_n| = N!
  std::uint64_t distinct_images = 0;   // |R_n|
  bool all_concordant = false;
  std::uint64_t components = 0;
  bool components_match_classes = false;
  std::map<std::uint64_t, std::uint64_t> component_size_histogram;  // size -> count
  std::uint64_t white_edges = 0;       // ordered (order, position) incidences
  std::uint64_t total_edges = 0;
  double mean_preimages = 0;           // |L_n| / |R_n|
  double lower_bound = 0;              // N! / ((n-1)!)^n
  double upper_bound = 0;              // N! / prod_{k=1}^{n-2} k!
  bool bounds_hold = false;
};

inline constexpr std::size_t kMaxEnumeratePoints = 5;

/// Exhaustive census of all N! linear orders. Throws ResourceRefusal for n > 5.
CrsCensus enumerate_small(std::size_t n);

/// Uniform random linear order (Fisher-Yates over pair indices).
LinearOrder random_linear_order(std::size_t n, std::uint64_t seed);

/// phi of a uniform random linear order.
Crs generic_crs(std::size_t n, std::uint64_t seed);

/// Worked five-point concordant system on {a,b,c,d,e} = {0,..,4}.
RankTable concordant5_table();
/// A linear extension of its order type: ab cd ce ae bc de ad ac bd be.
LinearOrder concordant5_extension();

}  // namespace nndlab
