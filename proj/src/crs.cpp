#include "nndlab/crs.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <queue>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "nndlab/rng.hpp"

namespace nndlab {

// ---------------------------------------------------------------------------
// Pair encoding and linear orders

PairCodec::PairCodec(std::size_t n) : n_(n) {
  if (n < 2) throw InputError("pair encoding needs at least two points");
  pairs_.reserve(n * (n - 1) / 2);
  for (ItemId i = 0; i < n; ++i) {
    for (ItemId j = i + 1; j < n; ++j) pairs_.push_back({i, j});
  }
}

PairIndex PairCodec::encode(ItemId a, ItemId b) const {
  if (a == b || a >= n_ || b >= n_) throw InputError("invalid point pair");
  const std::size_t lo = std::min(a, b);
  const std::size_t hi = std::max(a, b);
  return static_cast<PairIndex>(lo * n_ - lo * (lo + 1) / 2 + (hi - lo - 1));
}

LinearOrder LinearOrder::from_sequence(std::size_t n, std::vector<PairIndex> sequence) {
  if (n < 2) throw InputError("linear order needs at least two points");
  const std::size_t pairs = n * (n - 1) / 2;
  if (sequence.size() != pairs) throw InputError("linear order must list every pair once");
  LinearOrder order;
  order.n_ = n;
  order.sigma_.assign(pairs, 0);
  for (std::size_t k = 0; k < pairs; ++k) {
    const PairIndex p = sequence[k];
    if (p >= pairs || order.sigma_[p] != 0) {
      throw InputError("linear order must list every pair once");
    }
    order.sigma_[p] = static_cast<std::uint32_t>(k + 1);
  }
  order.sequence_ = std::move(sequence);
  return order;
}

LinearOrder LinearOrder::from_pairs(std::size_t n, const std::vector<Pair>& pairs) {
  const PairCodec codec(n);
  std::vector<PairIndex> sequence;
  sequence.reserve(pairs.size());
  for (const auto& p : pairs) sequence.push_back(codec.encode(p.lo, p.hi));
  return from_sequence(n, std::move(sequence));
}

LinearOrder LinearOrder::swapped(std::size_t pos) const {
  if (pos < 1 || pos + 1 > sequence_.size()) throw InputError("swap position out of range");
  LinearOrder out = *this;
  std::swap(out.sequence_[pos - 1], out.sequence_[pos]);
  out.sigma_[out.sequence_[pos - 1]] = static_cast<std::uint32_t>(pos);
  out.sigma_[out.sequence_[pos]] = static_cast<std::uint32_t>(pos + 1);
  return out;
}

// ---------------------------------------------------------------------------
// Order type

OrderDag::OrderDag(std::size_t nodes, std::vector<std::pair<PairIndex, PairIndex>> edges)
    : edges_(std::move(edges)), offsets_(nodes + 1, 0) {
  for (const auto& [from, to] : edges_) {
    if (from >= nodes || to >= nodes) throw InputError("order DAG edge out of range");
    ++offsets_[from + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  targets_.resize(edges_.size());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& [from, to] : edges_) targets_[fill[from]++] = to;
}

bool OrderDag::reaches(PairIndex a, PairIndex b) const {
  if (a == b) return true;
  std::vector<bool> seen(nodes(), false);
  std::vector<PairIndex> stack{a};
  seen[a] = true;
  while (!stack.empty()) {
    const PairIndex p = stack.back();
    stack.pop_back();
    for (PairIndex q : successors(p)) {
      if (q == b) return true;
      if (!seen[q]) {
        seen[q] = true;
        stack.push_back(q);
      }
    }
  }
  return false;
}

Crs concordancy_check(const RankTable& table) {
  const std::size_t n = table.size();
  const PairCodec codec(n);
  const std::size_t nodes = codec.pairs();
  std::vector<std::pair<PairIndex, PairIndex>> edges;
  edges.reserve(n * (n - 2));
  for (ItemId x = 0; x < n; ++x) {
    const auto order = table.order(x);
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
      edges.emplace_back(codec.encode(x, order[k]), codec.encode(x, order[k + 1]));
    }
  }
  OrderDag dag(nodes, std::move(edges));

  // Iterative three-colour DFS; a grey successor closes a cycle.
  enum : std::uint8_t { white, grey, black };
  std::vector<std::uint8_t> colour(nodes, white);
  std::vector<std::pair<PairIndex, std::size_t>> stack;
  for (PairIndex start = 0; start < nodes; ++start) {
    if (colour[start] != white) continue;
    stack.emplace_back(start, 0);
    colour[start] = grey;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      const auto succ = dag.successors(node);
      if (next == succ.size()) {
        colour[node] = black;
        stack.pop_back();
        continue;
      }
      const PairIndex q = succ[next++];
      if (colour[q] == white) {
        colour[q] = grey;
        stack.emplace_back(q, 0);
      } else if (colour[q] == grey) {
        CycleWitness witness;
        auto it = std::find_if(stack.begin(), stack.end(),
                               [q](const auto& frame) { return frame.first == q; });
        for (; it != stack.end(); ++it) witness.cycle.push_back(it->first);
        return Crs{table, std::move(witness)};
      }
    }
  }
  return Crs{table, std::move(dag)};
}

Crs phi(const LinearOrder& order) {
  const std::size_t n = order.points();
  const PairCodec codec(n);
  std::vector<std::vector<ItemId>> orders(n);
  for (auto& o : orders) o.reserve(n - 1);
  for (PairIndex p : order.sequence()) {
    const Pair pair = codec.decode(p);
    orders[pair.lo].push_back(pair.hi);
    orders[pair.hi].push_back(pair.lo);
  }
  return concordancy_check(RankTable::from_orders(orders, std::max(n, kDefaultRankTableCap)));
}

// ---------------------------------------------------------------------------
// l_inf embedding

LinearOrder linear_extension(const Crs& crs, std::uint64_t seed) {
  if (!crs.concordant()) throw NotConcordantError(crs.cycle());
  const OrderDag& dag = crs.dag();
  const std::size_t nodes = dag.nodes();
  std::vector<std::uint32_t> indegree(nodes, 0);
  for (const auto& e : dag.edges()) ++indegree[e.second];
  using Key = std::pair<std::uint64_t, PairIndex>;
  std::priority_queue<Key, std::vector<Key>, std::greater<>> ready;
  const auto key = [seed](PairIndex p) { return Key{mix64(seed ^ mix64(p)), p}; };
  for (PairIndex p = 0; p < nodes; ++p) {
    if (indegree[p] == 0) ready.push(key(p));
  }
  std::vector<PairIndex> sequence;
  sequence.reserve(nodes);
  while (!ready.empty()) {
    const PairIndex p = ready.top().second;
    ready.pop();
    sequence.push_back(p);
    for (PairIndex q : dag.successors(p)) {
      if (--indegree[q] == 0) ready.push(key(q));
    }
  }
  if (sequence.size() != nodes) throw InvariantViolation("order DAG has a cycle");
  return LinearOrder::from_sequence(crs.table.size(), std::move(sequence));
}

EmbeddingMatrix linf_embed(const Crs& crs, const LinearOrder& extension,
                           std::span<const ItemId> point_order) {
  if (!crs.concordant()) throw NotConcordantError(crs.cycle());
  const std::size_t n = crs.table.size();
  if (extension.points() != n) throw InputError("extension is over a different point set");
  for (const auto& [from, to] : crs.dag().edges()) {
    if (extension.sigma(from) >= extension.sigma(to)) {
      throw InputError("supplied order does not extend the order type");
    }
  }
  std::vector<std::size_t> position(n);
  if (point_order.empty()) {
    std::iota(position.begin(), position.end(), std::size_t{0});
  } else {
    if (point_order.size() != n) throw InputError("point order must be a permutation");
    std::vector<bool> seen(n, false);
    for (std::size_t k = 0; k < n; ++k) {
      if (point_order[k] >= n || seen[point_order[k]]) {
        throw InputError("point order must be a permutation");
      }
      seen[point_order[k]] = true;
      position[point_order[k]] = k;
    }
  }

  const PairCodec codec(n);
  const std::size_t pairs = codec.pairs();
  EmbeddingMatrix emb{n, pairs, std::vector<double>(n * pairs, 0.0)};
  for (PairIndex p = 0; p < pairs; ++p) {
    const Pair pair = codec.decode(p);
    const std::uint32_t sigma = extension.sigma(p);
    const double magnitude = 1.0 + static_cast<double>(sigma) / static_cast<double>(pairs);
    const bool lo_first = position[pair.lo] < position[pair.hi];
    const ItemId plus = lo_first ? pair.lo : pair.hi;
    const ItemId minus = lo_first ? pair.hi : pair.lo;
    emb.at(plus, sigma - 1) = magnitude;
    emb.at(minus, sigma - 1) = -magnitude;
  }
  return emb;
}

EmbeddingMatrix linf_embed(const Crs& crs, std::uint64_t seed) {
  return linf_embed(crs, linear_extension(crs, seed));
}

double sup_distance(const EmbeddingMatrix& emb, ItemId x, ItemId y) {
  double out = 0.0;
  for (std::size_t c = 0; c < emb.cols; ++c) {
    out = std::max(out, std::fabs(emb.at(x, c) - emb.at(y, c)));
  }
  return out;
}

bool verify_embedding(const Crs& crs, const EmbeddingMatrix& emb) {
  const std::size_t n = crs.table.size();
  if (emb.rows != n || emb.coords.size() != emb.rows * emb.cols) return false;
  std::vector<double> dist(n);
  for (ItemId x = 0; x < n; ++x) {
    for (ItemId y = 0; y < n; ++y) dist[y] = y == x ? 0.0 : sup_distance(emb, x, y);
    const auto order = crs.table.order(x);
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
      if (!(dist[order[k]] < dist[order[k + 1]])) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Equivalent-metrics graph

bool swap_is_white(const LinearOrder& order, std::size_t pos) {
  if (pos < 1 || pos + 1 > order.pairs()) throw InputError("swap position out of range");
  const PairCodec codec(order.points());
  return codec.decode(order.at(pos)).disjoint(codec.decode(order.at(pos + 1)));
}

bool is_isolated(const LinearOrder& order) {
  for (std::size_t pos = 1; pos < order.pairs(); ++pos) {
    if (swap_is_white(order, pos)) return false;
  }
  return true;
}

namespace {

std::string sequence_key(std::span<const PairIndex> seq) {
  std::string key(seq.size() * sizeof(PairIndex), '\0');
  std::memcpy(key.data(), seq.data(), key.size());
  return key;
}

}  // namespace

WhiteComponent white_component(const LinearOrder& order, std::size_t cap) {
  if (cap == 0) throw InputError("white component cap must be positive");
  const PairCodec codec(order.points());
  std::vector<Pair> decoded(codec.pairs());
  for (PairIndex p = 0; p < decoded.size(); ++p) decoded[p] = codec.decode(p);

  WhiteComponent out;
  std::unordered_set<std::string> seen{sequence_key(order.sequence())};
  out.members.push_back(order);
  for (std::size_t head = 0; head < out.members.size(); ++head) {
    const LinearOrder current = out.members[head];
    const auto seq = current.sequence();
    for (std::size_t pos = 1; pos < seq.size(); ++pos) {
      if (!decoded[seq[pos - 1]].disjoint(decoded[seq[pos]])) continue;
      LinearOrder next = current.swapped(pos);
      if (!seen.insert(sequence_key(next.sequence())).second) continue;
      if (out.members.size() == cap) {
        out.partial = true;
        return out;
      }
      out.members.push_back(std::move(next));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Special orders

LinearOrder powers_of_two_order(std::size_t n) {
  if (n < 3) throw InputError("powers-of-two order needs n >= 3");
  // 2^j - 2^i grows with j first and shrinks with i, so pairs come grouped
  // by their larger element, smaller element descending.
  std::vector<Pair> pairs;
  pairs.reserve(n * (n - 1) / 2);
  for (ItemId j = 1; j < n; ++j) {
    for (ItemId i = j; i-- > 0;) pairs.push_back({i, j});
  }
  return LinearOrder::from_pairs(n, pairs);
}

std::vector<std::vector<Pair>> round_robin_matchings(std::size_t n) {
  if (n < 4 || n % 2 != 0) throw InputError("round-robin factorization needs even n >= 4");
  const auto m = static_cast<ItemId>(n - 1);
  std::vector<std::vector<Pair>> matchings;
  for (ItemId r = 0; r < m; ++r) {
    std::vector<Pair> matching{{r, m}};
    for (ItemId k = 1; k < n / 2; ++k) {
      const ItemId a = (r + k) % m;
      const ItemId b = (r + m - k) % m;
      matching.push_back({std::min(a, b), std::max(a, b)});
    }
    matchings.push_back(std::move(matching));
  }
  return matchings;
}

LinearOrder baranyai_order(std::size_t n) {
  auto matchings = round_robin_matchings(n);
  const PairCodec codec(n);
  std::vector<Pair> pairs;
  pairs.reserve(codec.pairs());
  for (auto& matching : matchings) {
    std::sort(matching.begin(), matching.end(), [&](const Pair& a, const Pair& b) {
      return codec.encode(a.lo, a.hi) < codec.encode(b.lo, b.hi);
    });
    if (!pairs.empty()) {
      // Lead with a pair disjoint from the previous matching's tail when one
      // exists (always for n >= 6) so the boundary swap is white as well.
      auto lead = std::find_if(matching.begin(), matching.end(),
                               [&](const Pair& p) { return p.disjoint(pairs.back()); });
      if (lead != matching.end()) std::rotate(matching.begin(), lead, lead + 1);
    }
    pairs.insert(pairs.end(), matching.begin(), matching.end());
  }
  return LinearOrder::from_pairs(n, pairs);
}

LinearOrder eulerian_order(std::size_t n) {
  if (n < 3 || n % 2 == 0) throw InputError("Eulerian order needs odd n >= 3");
  const PairCodec codec(n);
  std::vector<bool> used(codec.pairs(), false);
  std::vector<ItemId> next_neighbor(n, 0);
  // Hierholzer: vertices are emitted in reverse circuit order.
  std::vector<ItemId> stack{0}, circuit;
  while (!stack.empty()) {
    const ItemId v = stack.back();
    ItemId& w = next_neighbor[v];
    while (w < n && (w == v || used[codec.encode(v, w)])) ++w;
    if (w < n) {
      used[codec.encode(v, w)] = true;
      stack.push_back(w);
    } else {
      circuit.push_back(v);
      stack.pop_back();
    }
  }
  std::reverse(circuit.begin(), circuit.end());
  std::vector<PairIndex> sequence;
  sequence.reserve(codec.pairs());
  for (std::size_t k = 1; k < circuit.size(); ++k) {
    sequence.push_back(codec.encode(circuit[k - 1], circuit[k]));
  }
  return LinearOrder::from_sequence(n, std::move(sequence));
}

// ---------------------------------------------------------------------------
// Random orders and counting

LinearOrder random_linear_order(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw InputError("random linear order needs n >= 2");
  const std::size_t pairs = n * (n - 1) / 2;
  std::vector<PairIndex> sequence(pairs);
  std::iota(sequence.begin(), sequence.end(), PairIndex{0});
  Rng rng = make_rng(seed, 0x6f72646572);
  for (std::size_t i = pairs; i > 1; --i) std::swap(sequence[i - 1], sequence[uniform_index(rng, i)]);
  return LinearOrder::from_sequence(n, std::move(sequence));
}

Crs generic_crs(std::size_t n, std::uint64_t seed) { return phi(random_linear_order(n, seed)); }

WhiteEdgeFraction white_edge_fraction(std::size_t n, std::size_t samples, std::uint64_t seed) {
  if (n < 3) throw InputError("white edge fraction needs n >= 3");
  WhiteEdgeFraction out;
  const std::uint64_t disjoint = (n - 2) * (n - 3) / 2;
  const std::uint64_t edges = n * (n - 1) / 2 - 1;
  const std::uint64_t g = std::gcd(disjoint, edges);
  out.numerator = disjoint / g;
  out.denominator = edges / g;
  out.exact = static_cast<double>(disjoint) / static_cast<double>(edges);
  out.samples = samples;
  if (samples == 0) return out;

  const PairCodec codec(n);
  Rng rng = make_rng(seed, 0x7768697465);
  std::vector<PairIndex> sequence(codec.pairs());
  std::size_t white = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    std::iota(sequence.begin(), sequence.end(), PairIndex{0});
    for (std::size_t i = sequence.size(); i > 1; --i) {
      std::swap(sequence[i - 1], sequence[uniform_index(rng, i)]);
    }
    const std::size_t pos = uniform_index<std::size_t>(rng, sequence.size() - 1);
    if (codec.decode(sequence[pos]).disjoint(codec.decode(sequence[pos + 1]))) ++white;
  }
  out.empirical = static_cast<double>(white) / static_cast<double>(samples);
  return out;
}

namespace {

struct DisjointSets {
  std::vector<std::uint32_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0u);
  }
  std::uint32_t find(std::uint32_t v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

double factorial(std::size_t k) { return std::tgamma(static_cast<double>(k) + 1.0); }

}  // namespace

CrsCensus enumerate_small(std::size_t n) {
  if (n > kMaxEnumeratePoints) {
    throw ResourceRefusal("exhaustive enumeration refused for n > 5 (N! orders)");
  }
  if (n < 2) throw InputError("enumeration needs n >= 2");
  const PairCodec codec(n);
  const std::size_t pairs = codec.pairs();
  std::vector<Pair> decoded(pairs);
  for (PairIndex p = 0; p < pairs; ++p) decoded[p] = codec.decode(p);

  std::vector<std::uint64_t> fact(pairs + 1, 1);
  for (std::size_t k = 1; k <= pairs; ++k) fact[k] = fact[k - 1] * k;
  const std::uint64_t total = fact[pairs];

  CrsCensus census;
  census.n = n;
  census.pairs = pairs;
  census.orders = total;

  std::vector<std::uint32_t> class_of(total);
  std::unordered_map<std::string, std::uint32_t> classes;
  std::vector<std::string> class_keys;
  DisjointSets components(total);

  std::vector<PairIndex> seq(pairs);
  std::iota(seq.begin(), seq.end(), PairIndex{0});
  std::vector<std::uint32_t> lehmer(pairs);
  std::string key(n * (n - 1), '\0');
  std::vector<std::size_t> fill(n);

  // std::next_permutation walks orders in lexicographic order, so the loop
  // counter is the lexicographic rank of `seq`.
  for (std::uint64_t rank = 0; rank < total; ++rank) {
    for (std::size_t x = 0; x < n; ++x) fill[x] = x * (n - 1);
    for (PairIndex p : seq) {
      key[fill[decoded[p].lo]++] = static_cast<char>(decoded[p].hi);
      key[fill[decoded[p].hi]++] = static_cast<char>(decoded[p].lo);
    }
    const auto [it, inserted] =
        classes.try_emplace(key, static_cast<std::uint32_t>(class_keys.size()));
    if (inserted) class_keys.push_back(key);
    class_of[rank] = it->second;

    for (std::size_t i = 0; i < pairs; ++i) {
      std::uint32_t smaller = 0;
      for (std::size_t j = i + 1; j < pairs; ++j) smaller += seq[j] < seq[i];
      lehmer[i] = smaller;
    }
    for (std::size_t i = 0; i + 1 < pairs; ++i) {
      if (!decoded[seq[i]].disjoint(decoded[seq[i + 1]])) continue;
      ++census.white_edges;
      // Rank of the order with positions i, i+1 exchanged.
      const bool ascending = seq[i] < seq[i + 1];
      const std::uint64_t new_i = lehmer[i + 1] + (ascending ? 1 : 0);
      const std::uint64_t new_next = lehmer[i] - (ascending ? 0 : 1);
      const std::uint64_t swapped = rank - lehmer[i] * fact[pairs - 1 - i] -
                                    lehmer[i + 1] * fact[pairs - 2 - i] +
                                    new_i * fact[pairs - 1 - i] + new_next * fact[pairs - 2 - i];
      components.unite(static_cast<std::uint32_t>(rank), static_cast<std::uint32_t>(swapped));
    }
    census.total_edges += pairs - 1;
    std::next_permutation(seq.begin(), seq.end());
  }

  census.distinct_images = class_keys.size();
  census.all_concordant = true;
  for (const auto& k : class_keys) {
    std::vector<std::vector<ItemId>> orders(n);
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t s = 0; s + 1 < n; ++s) {
        orders[x].push_back(static_cast<ItemId>(static_cast<unsigned char>(k[x * (n - 1) + s])));
      }
    }
    if (!concordancy_check(RankTable::from_orders(orders)).concordant()) {
      census.all_concordant = false;
    }
  }

  // Components must coincide with phi-preimage classes.
  std::unordered_map<std::uint32_t, std::uint32_t> class_of_root;
  std::unordered_map<std::uint32_t, std::uint64_t> root_size;
  bool consistent = true;
  for (std::uint64_t rank = 0; rank < total; ++rank) {
    const std::uint32_t root = components.find(static_cast<std::uint32_t>(rank));
    const auto [it, inserted] = class_of_root.try_emplace(root, class_of[rank]);
    if (!inserted && it->second != class_of[rank]) consistent = false;
    ++root_size[root];
  }
  census.components = root_size.size();
  census.components_match_classes = consistent && census.components == census.distinct_images;
  for (const auto& [root, size] : root_size) ++census.component_size_histogram[size];

  census.mean_preimages = static_cast<double>(total) / static_cast<double>(census.distinct_images);
  census.lower_bound = static_cast<double>(total) / std::pow(factorial(n - 1), static_cast<double>(n));
  double denom = 1.0;
  for (std::size_t k = 1; k + 2 <= n; ++k) denom *= factorial(k);
  census.upper_bound = static_cast<double>(total) / denom;
  census.bounds_hold =
      census.lower_bound < census.mean_preimages && census.mean_preimages < census.upper_bound;
  return census;
}

RankTable concordant5_table() {
  return RankTable::from_orders({{1, 4, 3, 2}, {0, 2, 3, 4}, {3, 4, 1, 0}, {2, 4, 0, 1}, {2, 0, 3, 1}});
}

LinearOrder concordant5_extension() {
  return LinearOrder::from_pairs(
      5, {{0, 1}, {2, 3}, {2, 4}, {0, 4}, {1, 2}, {3, 4}, {0, 3}, {0, 2}, {1, 3}, {1, 4}});
}

}  // namespace nndlab
