#include "nndlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nndlab/error.hpp"
#include "nndlab/rng.hpp"

namespace nndlab {

UndirectedGraph::UndirectedGraph(const KnnGraph& graph) {
  std::vector<std::pair<ItemId, ItemId>> arcs;
  arcs.reserve(graph.size() * graph.k());
  for (ItemId x = 0; x < graph.size(); ++x) {
    for (ItemId y : graph.neighbors(x)) arcs.emplace_back(x, y);
  }
  build(graph.size(), arcs);
}

UndirectedGraph::UndirectedGraph(std::size_t n,
                                 std::span<const std::pair<ItemId, ItemId>> edges) {
  build(n, edges);
}

void UndirectedGraph::build(std::size_t n, std::span<const std::pair<ItemId, ItemId>> edges) {
  offsets_.assign(n + 1, 0);
  for (const auto& [a, b] : edges) {
    if (a >= n || b >= n || a == b) throw InputError("invalid edge");
    ++offsets_[a + 1];
    ++offsets_[b + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  targets_.resize(2 * edges.size());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& [a, b] : edges) {
    targets_[fill[a]++] = b;
    targets_[fill[b]++] = a;
  }
}

std::vector<std::int32_t> bfs_distances(const UndirectedGraph& g, ItemId source) {
  const std::size_t n = g.size();
  if (source >= n) throw InputError("BFS source out of range");
  std::vector<std::int32_t> dist(n, -1);
  std::vector<ItemId> queue{source};
  queue.reserve(n);
  dist[source] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const ItemId v = queue[head];
    for (ItemId w : g.neighbors(v)) {
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

std::optional<std::size_t> diameter_serial(const UndirectedGraph& g) {
  std::size_t best = 0;
  for (ItemId s = 0; s < g.size(); ++s) {
    const auto dist = bfs_distances(g, s);
    for (std::int32_t d : dist) {
      if (d < 0) return std::nullopt;
      best = std::max(best, static_cast<std::size_t>(d));
    }
  }
  return best;
}

std::optional<std::size_t> diameter_bitparallel(const UndirectedGraph& g) {
  const std::size_t n = g.size();
  const auto batches = static_cast<std::int64_t>((n + 63) / 64);
  std::size_t best = 0;
  bool disconnected = false;
#pragma omp parallel reduction(max : best) reduction(|| : disconnected)
  {
    std::vector<std::uint64_t> seen(n), frontier(n), next(n);
#pragma omp for schedule(dynamic, 1)
    for (std::int64_t b = 0; b < batches; ++b) {
      const std::size_t base = static_cast<std::size_t>(b) * 64;
      const std::size_t count = std::min<std::size_t>(64, n - base);
      const std::uint64_t mask = count == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << count) - 1;
      std::fill(seen.begin(), seen.end(), 0);
      std::fill(frontier.begin(), frontier.end(), 0);
      for (std::size_t i = 0; i < count; ++i) {
        seen[base + i] = frontier[base + i] = std::uint64_t{1} << i;
      }
      std::size_t level = 0;
      for (;;) {
        std::uint64_t grew = 0;
        for (std::size_t v = 0; v < n; ++v) {
          std::uint64_t reach = 0;
          for (ItemId u : g.neighbors(static_cast<ItemId>(v))) reach |= frontier[u];
          next[v] = reach & ~seen[v];
          grew |= next[v];
        }
        if (grew == 0) break;
        ++level;
        for (std::size_t v = 0; v < n; ++v) seen[v] |= next[v];
        std::swap(frontier, next);
      }
      best = std::max(best, level);
      for (std::size_t v = 0; v < n; ++v) {
        if ((seen[v] & mask) != mask) {
          disconnected = true;
          break;
        }
      }
    }
  }
  if (disconnected) return std::nullopt;
  return best;
}

DiameterResult undirected_diameter(const UndirectedGraph& g, std::size_t cutoff) {
  const std::size_t n = g.size();
  if (n < 2) throw InputError("diameter needs at least two vertices");
  DiameterResult out;
  if (n <= cutoff) {
    const auto d = diameter_bitparallel(g);
    out.connected = d.has_value();
    if (d) out.lower = out.upper = *d;
    return out;
  }

  const auto farthest = [](const std::vector<std::int32_t>& dist) {
    return static_cast<ItemId>(std::max_element(dist.begin(), dist.end()) - dist.begin());
  };
  const auto d0 = bfs_distances(g, 0);
  if (std::find(d0.begin(), d0.end(), -1) != d0.end()) {
    out.connected = false;
    return out;
  }
  const ItemId u = farthest(d0);
  const auto du = bfs_distances(g, u);
  const ItemId w = farthest(du);
  const auto dw = bfs_distances(g, w);
  const auto ecc_u = static_cast<std::size_t>(du[w]);
  // A midpoint of the u-w geodesic tends to have near-minimal eccentricity.
  ItemId mid = u;
  for (ItemId v = 0; v < n; ++v) {
    if (static_cast<std::size_t>(du[v] + dw[v]) == ecc_u && du[v] == du[w] / 2) {
      mid = v;
      break;
    }
  }
  const auto dm = bfs_distances(g, mid);
  const auto ecc = [](const std::vector<std::int32_t>& dist) {
    return static_cast<std::size_t>(*std::max_element(dist.begin(), dist.end()));
  };
  out.lower = ecc_u;
  out.upper = 2 * std::min({ecc(d0), ecc_u, ecc(dm)});
  return out;
}

DiameterReport diameter_experiment(std::size_t n, std::size_t k, std::size_t trials,
                                   double epsilon, std::uint64_t seed) {
  if (k < 3) throw DomainError("diameter experiment requires K >= 3");
  if (!(epsilon > 0.0)) throw InputError("epsilon must be positive");
  if (trials == 0) throw InputError("trials must be positive");
  DiameterReport rep;
  rep.n = n;
  rep.k = k;
  rep.trials = trials;
  rep.epsilon = epsilon;
  rep.seed = seed;
  rep.bound = (1.0 + epsilon) * std::log(static_cast<double>(n)) /
              std::log(static_cast<double>(k - 1));
  std::size_t within = 0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const FriendState state = init_random_kout(n, k, mix64(seed ^ mix64(trial)));
    const DiameterResult d = undirected_diameter(UndirectedGraph(state));
    if (!d.connected) {
      ++rep.disconnected;
      continue;
    }
    rep.diameters.push_back(d.upper);
    if (static_cast<double>(d.upper) <= rep.bound) ++within;
  }
  rep.fraction_within = static_cast<double>(within) / static_cast<double>(trials);
  return rep;
}

ExpansionReport expansion_check(const KnnGraph& graph, double expansion_alpha, double epsilon,
                                std::size_t sample_sets, std::uint64_t seed) {
  const std::size_t n = graph.size();
  const std::size_t k = graph.k();
  if (!(expansion_alpha > 0.0)) throw InputError("expansion alpha must be positive");
  if (n < 3) throw InputError("expansion check needs n >= 3");
  const double limit = expansion_alpha * static_cast<double>(n) / std::log(static_cast<double>(n));
  const auto max_size = static_cast<std::size_t>(std::ceil(limit)) - 1;
  if (max_size < 1) throw InputError("alpha n / ln n leaves no set size to test");

  ExpansionReport rep;
  rep.expansion_alpha = expansion_alpha;
  rep.epsilon = epsilon;
  rep.max_size = max_size;
  rep.sample_sets = sample_sets;
  rep.seed = seed;
  rep.min_ratio = std::numeric_limits<double>::infinity();

  Rng rng = make_rng(seed, 0x657870);
  std::vector<ItemId> perm(n);
  std::iota(perm.begin(), perm.end(), ItemId{0});
  // Stamps avoid clearing the membership arrays between samples.
  std::vector<std::size_t> in_set(n, 0), in_boundary(n, 0);
  const double threshold = static_cast<double>(k) - 1.0 - epsilon;
  for (std::size_t s = 1; s <= sample_sets; ++s) {
    const std::size_t size = 1 + uniform_index<std::size_t>(rng, max_size);
    for (std::size_t i = 0; i < size; ++i) {
      std::swap(perm[i], perm[i + uniform_index<std::size_t>(rng, n - i)]);
      in_set[perm[i]] = s;
    }
    std::size_t boundary = 0;
    for (std::size_t i = 0; i < size; ++i) {
      for (ItemId y : graph.neighbors(perm[i])) {
        if (in_set[y] != s && in_boundary[y] != s) {
          in_boundary[y] = s;
          ++boundary;
        }
      }
    }
    const double ratio = static_cast<double>(boundary) / static_cast<double>(size);
    rep.min_ratio = std::min(rep.min_ratio, ratio);
    if (ratio <= threshold) ++rep.violations;
  }
  if (sample_sets == 0) rep.min_ratio = 0;
  return rep;
}

double expansion_proof_alpha(std::size_t k, double epsilon) {
  if (!(epsilon > 0.0)) throw InputError("epsilon must be positive");
  const double kk = static_cast<double>(k) + 1.0;
  const double log_inner = (2.0 + epsilon) + (2.0 + 2.0 * epsilon) * std::log(kk);
  return std::exp(-log_inner / epsilon);
}

}  // namespace nndlab
