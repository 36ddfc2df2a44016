#include "nndlab/twonrq.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include <boost/random/binomial_distribution.hpp>

#include "nndlab/error.hpp"
#include "nndlab/rng.hpp"

namespace nndlab {

namespace {

constexpr int kBisectionIterations = 200;
constexpr double kBisectionTolerance = 1e-12;

double pow_d(double x, std::size_t d) { return std::pow(x, static_cast<double>(d)); }

}  // namespace

double TwoNrqParams::min_radius() const {
  return std::pow(k / (n * alpha), 1.0 / static_cast<double>(d));
}

double TwoNrqParams::rate(double r) const { return k / (n * pow_d(r, d)); }

TwoNrqParams derive_params(double n, double k, std::size_t d, double alpha) {
  if (!(n > 0.0) || !std::isfinite(n)) throw InputError("n must be positive");
  if (!(k > 0.0) || !std::isfinite(k)) throw InputError("K must be positive");
  if (d < 1) throw InputError("dimension must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0,1)");
  const double cube = std::ldexp(1.0, static_cast<int>(d));
  if (!(k > cube)) throw DomainError("K must exceed 2^d (dimension too high for K)");
  if (!(k < n)) throw InputError("K must be smaller than n");

  TwoNrqParams p;
  p.n = n;
  p.k = k;
  p.d = d;
  p.alpha = alpha;
  p.beta = -std::log1p(-alpha) / alpha;
  if (!(p.beta > 1.0 && p.beta < k / cube)) {
    throw DomainError("beta = -log(1-alpha)/alpha must lie in (1, K/2^d); lower alpha");
  }
  const double inv_d = 1.0 / static_cast<double>(d);
  p.gamma = 1.0 - std::sqrt(1.0 - 2.0 / std::pow(k, inv_d));
  p.gamma_star = 1.0 - std::sqrt(1.0 - 2.0 * std::pow(p.beta / k, inv_d));
  const double lk = std::log2(k / p.beta);
  p.t_prime_bound = std::log2(lk / (lk - static_cast<double>(d)));
  return p;
}

double g_min_overlap(double s, double r, std::size_t d) {
  if (s < 0.0 || r < 0.0) throw InputError("overlap arguments must be non-negative");
  if (s >= 2.0 * r) return 0.0;
  return std::min(1.0, pow_d(2.0 * r - s, d));
}

double nu_overlap(std::span<const double> u, std::span<const double> v, double r) {
  if (u.size() != v.size()) throw InputError("torus points must have the same dimension");
  double volume = 1.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double t = torus_axis_distance(u[i], v[i]);
    volume *= std::min(2.0, std::max(0.0, 2.0 * r - t) + std::max(0.0, 2.0 * r + t - 2.0));
  }
  return volume;
}

double nu_overlap(const TorusSpace& space, ItemId u, ItemId v, double r) {
  return nu_overlap(space.point(u), space.point(v), r);
}

std::optional<RadiusStep> solve_next_radius(const TwoNrqParams& p, double r_prev) {
  const double r_min = p.min_radius();
  if (!(r_prev <= 1.0) || r_prev < r_min) throw InputError("previous radius outside [r_min, 1]");
  const double theta_prev = p.rate(r_prev);
  const double cube = std::ldexp(1.0, static_cast<int>(p.d));
  const double inv_d = 1.0 / static_cast<double>(p.d);

  if (r_prev > 0.5) {
    const double c = theta_prev * theta_prev * p.n / cube;
    const double r = std::pow(p.k / (p.n * -std::expm1(-c)), inv_d);
    if (2.0 * r_prev - r >= 1.0 && r >= r_min && r < r_prev) return RadiusStep{r, true};
  }

  // F decreases across the bracket; a root exists iff F(lo) > 0.
  const auto f = [&](double r) {
    return -std::log1p(-p.k / (p.n * pow_d(r, p.d))) -
           theta_prev * theta_prev * p.n * pow_d(2.0 * r_prev - r, p.d) / cube;
  };
  double lo = std::max(r_min, p.gamma * r_prev);
  double hi = r_prev;
  if (!(f(lo) > 0.0)) return std::nullopt;
  for (int it = 0; it < kBisectionIterations && hi - lo > kBisectionTolerance; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return RadiusStep{0.5 * (lo + hi), false};
}

Schedule compute_schedule(const TwoNrqParams& p) {
  Schedule s;
  s.radii.push_back(1.0);
  s.rates.push_back(p.rate(1.0));
  s.explicit_formula.push_back(false);
  while (auto step = solve_next_radius(p, s.radii.back())) {
    s.radii.push_back(step->r);
    s.rates.push_back(p.rate(step->r));
    s.explicit_formula.push_back(step->explicit_formula);
    if (step->explicit_formula) s.t_prime = s.radii.size() - 1;
  }
  s.tau = s.radii.size() - 1;
  return s;
}

double round_bound(const TwoNrqParams& p, std::size_t t_prime) {
  return static_cast<double>(t_prime) +
         std::log(p.n * p.alpha / p.k) /
             (static_cast<double>(p.d) * std::log(1.0 / p.gamma_star));
}

Adjacency adjacency(const TwoNrqState& state) {
  const std::size_t n = state.size();
  Adjacency adj;
  adj.offsets.assign(n + 1, 0);
  for (const auto& [a, b] : state.edges) {
    ++adj.offsets[a + 1];
    ++adj.offsets[b + 1];
  }
  std::partial_sum(adj.offsets.begin(), adj.offsets.end(), adj.offsets.begin());
  adj.targets.resize(2 * state.edges.size());
  std::vector<std::size_t> fill(adj.offsets.begin(), adj.offsets.end() - 1);
  // Edges are sorted, so each list comes out sorted.
  for (const auto& [a, b] : state.edges) adj.targets[fill[a]++] = b;
  for (const auto& [a, b] : state.edges) adj.targets[fill[b]++] = a;
  for (ItemId v = 0; v < n; ++v) {
    std::sort(adj.targets.begin() + adj.offsets[v], adj.targets.begin() + adj.offsets[v + 1]);
  }
  return adj;
}

TwoNrqState init_e0(std::shared_ptr<const TorusSpace> space, double k, double n_mean,
                    std::uint64_t seed) {
  if (!space) throw InputError("missing point set");
  const std::size_t m = space->size();
  if (m < 2) throw InputError("E_0 needs at least two points");
  const double p = k / n_mean;
  if (!(p > 0.0 && p <= 1.0)) throw InputError("edge rate K/n must lie in (0,1]");

  Rng rng = make_rng(seed, 0x6530);
  const auto pairs = static_cast<long long>(m * (m - 1) / 2);
  const long long count =
      p >= 1.0 ? pairs : boost::random::binomial_distribution<long long, double>(pairs, p)(rng);

  TwoNrqState state;
  state.space = std::move(space);
  state.edges.reserve(static_cast<std::size_t>(count));
  const auto key_of = [m](ItemId a, ItemId b) { return std::uint64_t{a} * m + b; };

  // Rejection sampling of the smaller of the chosen set and its complement.
  const bool dense = 2 * count > pairs;
  const long long draws = dense ? pairs - count : count;
  std::unordered_set<std::uint64_t> drawn;
  drawn.reserve(static_cast<std::size_t>(draws));
  while (static_cast<long long>(drawn.size()) < draws) {
    auto a = static_cast<ItemId>(uniform_index<std::size_t>(rng, m));
    auto b = static_cast<ItemId>(uniform_index<std::size_t>(rng, m));
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    drawn.insert(key_of(a, b));
  }
  if (dense) {
    for (ItemId a = 0; a < m; ++a) {
      for (ItemId b = a + 1; b < m; ++b) {
        if (!drawn.contains(key_of(a, b))) state.edges.emplace_back(a, b);
      }
    }
  } else {
    for (std::uint64_t key : drawn) {
      state.edges.emplace_back(static_cast<ItemId>(key / m), static_cast<ItemId>(key % m));
    }
    std::sort(state.edges.begin(), state.edges.end());
  }
  return state;
}

namespace {

struct RoundContext {
  const TorusSpace& space;
  const Adjacency& adj;
  double r_t;
  double r_prev;
  double g_value;
  std::uint64_t round_key;
};

/// Proposals of one hub; returns the number of examined pairs. Sets
/// `bad_rate` instead of throwing so it is safe inside a parallel region.
std::uint64_t hub_proposals(const RoundContext& ctx, ItemId hub,
                            std::vector<std::pair<ItemId, ItemId>>& out, bool& bad_rate) {
  const auto nb = ctx.adj.neighbors(hub);
  const std::uint64_t n = ctx.space.size();
  std::uint64_t examined = 0;
  for (std::size_t i = 0; i < nb.size(); ++i) {
    for (std::size_t j = i + 1; j < nb.size(); ++j) {
      const ItemId a = nb[i];
      const ItemId b = nb[j];
      ++examined;
      if (torus_distance(ctx.space, a, b) > ctx.r_t) continue;
      const double f = ctx.g_value / nu_overlap(ctx.space, a, b, ctx.r_prev);
      if (!(f <= 1.0 + 1e-12)) {
        bad_rate = true;
        continue;
      }
      const std::uint64_t coin = mix64(ctx.round_key ^ mix64(std::uint64_t{a} * n + b)) ^ mix64(~std::uint64_t{hub});
      if (hash_uniform(coin) < f) out.emplace_back(a, b);
    }
  }
  return examined;
}

TwoNrqState finish_round(const TwoNrqState& state,
                         std::vector<std::pair<ItemId, ItemId>> edges, std::uint64_t examined,
                         bool bad_rate) {
  if (bad_rate) throw InvariantViolation("acceptance rate above 1: overlap volume below g");
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  TwoNrqState next;
  next.space = state.space;
  next.edges = std::move(edges);
  next.t = state.t + 1;
  next.distance_evals = state.distance_evals + examined;
  return next;
}

void check_round_args(const TwoNrqState& state, double r_t, double r_prev, double g_value) {
  if (!state.space) throw InputError("missing point set");
  if (!(r_t > 0.0 && r_t <= r_prev && r_prev <= 1.0)) {
    throw InputError("round radii must satisfy 0 < r_t <= r_prev <= 1");
  }
  if (!(g_value >= 0.0 && g_value <= 1.0)) throw InputError("g must lie in [0,1]");
}

}  // namespace

TwoNrqState range_query_round_serial(const TwoNrqState& state, double r_t, double r_prev,
                                     double g_value, std::uint64_t seed) {
  check_round_args(state, r_t, r_prev, g_value);
  const Adjacency adj = adjacency(state);
  const RoundContext ctx{*state.space, adj, r_t, r_prev, g_value, mix64(seed ^ mix64(state.t + 1))};
  std::vector<std::pair<ItemId, ItemId>> edges;
  std::uint64_t examined = 0;
  bool bad_rate = false;
  for (ItemId hub = 0; hub < state.size(); ++hub) {
    if (adj.degree(hub) >= 2) examined += hub_proposals(ctx, hub, edges, bad_rate);
  }
  return finish_round(state, std::move(edges), examined, bad_rate);
}

TwoNrqState range_query_round(const TwoNrqState& state, double r_t, double r_prev,
                              double g_value, std::uint64_t seed) {
  check_round_args(state, r_t, r_prev, g_value);
  const Adjacency adj = adjacency(state);
  const RoundContext ctx{*state.space, adj, r_t, r_prev, g_value, mix64(seed ^ mix64(state.t + 1))};
  const auto count = static_cast<std::int64_t>(state.size());
  std::vector<std::pair<ItemId, ItemId>> edges;
  std::uint64_t examined = 0;
  bool bad_rate = false;
#pragma omp parallel reduction(+ : examined) reduction(|| : bad_rate)
  {
    std::vector<std::pair<ItemId, ItemId>> local;
#pragma omp for schedule(dynamic, 256) nowait
    for (std::int64_t i = 0; i < count; ++i) {
      const auto hub = static_cast<ItemId>(i);
      if (adj.degree(hub) >= 2) examined += hub_proposals(ctx, hub, local, bad_rate);
    }
#pragma omp critical
    edges.insert(edges.end(), local.begin(), local.end());
  }
  return finish_round(state, std::move(edges), examined, bad_rate);
}

namespace {

/// Two-sample Kolmogorov-Smirnov statistic; sorts both inputs.
double ks_statistic(std::vector<double>& a, std::vector<double>& b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

struct MeanSe {
  double mean = 0;
  double se = 0;
};

MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe out;
  if (xs.empty()) return out;
  const double m = static_cast<double>(xs.size());
  out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / m;
  if (xs.size() < 2) return out;
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  out.se = std::sqrt(ss / (m - 1.0)) / std::sqrt(m);
  return out;
}

}  // namespace

SamplingReport verify_sampling_property(const TwoNrqState& state, double r_t, double theta_t,
                                        double expected_degree, std::size_t sample_size,
                                        std::uint64_t seed) {
  if (!state.space) throw InputError("missing point set");
  const TorusSpace& space = *state.space;
  const std::size_t n = state.size();
  const Adjacency adj = adjacency(state);

  SamplingReport rep;
  rep.t = state.t;
  rep.r_t = r_t;
  rep.theta_t = theta_t;
  rep.edges = state.edges.size();
  rep.expected_degree = expected_degree;
  for (ItemId v = 0; v < n; ++v) rep.max_degree = std::max(rep.max_degree, adj.degree(v));
  for (const auto& [a, b] : state.edges) {
    if (torus_distance(space, a, b) > r_t) ++rep.edges_beyond;
  }

  std::vector<ItemId> sample(n);
  std::iota(sample.begin(), sample.end(), ItemId{0});
  const std::size_t m = std::min(sample_size, n);
  Rng rng = make_rng(seed, 0x73616d70 + state.t);
  for (std::size_t i = 0; i < m; ++i) {
    std::swap(sample[i], sample[i + uniform_index<std::size_t>(rng, n - i)]);
  }
  sample.resize(m);
  rep.sampled = m;

  const auto h = [&](double s) { return std::pow(s / r_t, static_cast<double>(space.d)); };
  std::vector<double> rates, degrees, neighbor_u, ball_u;
  for (ItemId v : sample) {
    std::size_t q = 0;
    for (ItemId w = 0; w < n; ++w) {
      if (w == v) continue;
      const double s = torus_distance(space, v, w);
      if (s <= r_t) {
        ++q;
        ball_u.push_back(h(s));
      }
    }
    const std::size_t deg = adj.degree(v);
    degrees.push_back(static_cast<double>(deg));
    if (q > 0) rates.push_back(static_cast<double>(deg) / static_cast<double>(q));
    for (ItemId w : adj.neighbors(v)) {
      const double s = torus_distance(space, v, w);
      if (s <= r_t) neighbor_u.push_back(h(s));
    }
  }

  const MeanSe rate = mean_se(rates);
  rep.rate_mean = rate.mean;
  rep.rate_se = rate.se;
  rep.rate_ok = std::fabs(rate.mean - theta_t) <= 3.0 * rate.se;
  const MeanSe degree = mean_se(degrees);
  rep.degree_mean = degree.mean;
  rep.degree_se = degree.se;
  rep.degree_ok = std::fabs(degree.mean - expected_degree) <= 3.0 * degree.se;

  if (neighbor_u.empty() || ball_u.empty()) {
    rep.uniform_ok = neighbor_u.empty();
  } else {
    const double n1 = static_cast<double>(neighbor_u.size());
    const double n2 = static_cast<double>(ball_u.size());
    rep.ks_statistic = ks_statistic(neighbor_u, ball_u);
    rep.ks_critical = 1.628 * std::sqrt((n1 + n2) / (n1 * n2));
    rep.uniform_ok = rep.ks_statistic <= rep.ks_critical;
  }
  return rep;
}

TwoNrqRun run_2nrq(double n_mean, double k, std::size_t d, double alpha, std::uint64_t seed,
                   std::size_t sample_size) {
  TwoNrqRun run;
  run.params = derive_params(n_mean, k, d, alpha);
  run.schedule = compute_schedule(run.params);
  const Schedule& s = run.schedule;

  auto space = std::make_shared<const TorusSpace>(torus_poisson(n_mean, d, seed));
  TwoNrqState state = init_e0(space, k, n_mean, seed);
  run.rounds.push_back(verify_sampling_property(state, s.radii[0], s.rates[0], k, sample_size, seed));
  for (std::size_t t = 1; t <= s.tau; ++t) {
    const double g = g_min_overlap(s.radii[t], s.radii[t - 1], d);
    state = range_query_round(state, s.radii[t], s.radii[t - 1], g, seed);
    run.rounds.push_back(
        verify_sampling_property(state, s.radii[t], s.rates[t], k, sample_size, seed));
  }
  run.distance_evals = state.distance_evals;
  run.round_bound = round_bound(run.params, s.t_prime);
  run.work_bound = n_mean * k * k * run.round_bound;
  run.final_state = std::move(state);
  return run;
}

}  // namespace nndlab
