#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "nndlab/ranking.hpp"
#include "nndlab/spaces.hpp"

namespace nndlab {

/// Scaling constants of the second-neighbour range query on the l_inf torus.
struct TwoNrqParams {
  double n = 0;       // mean point count
  double k = 0;       // target mean degree
  std::size_t d = 0;  // dimension
  double alpha = 0;   // maximal success rate
  double beta = 0;    // -log(1 - alpha) / alpha
  double gamma = 0;       // 1 - sqrt(1 - 2 / K^(1/d))
  double gamma_star = 0;  // 1 - sqrt(1 - 2 (beta/K)^(1/d))
  double t_prime_bound = 0;

  /// Smallest admissible radius: r^d >= K / (n alpha).
  double min_radius() const;
  double rate(double r) const;  // theta = K / (n r^d)
};

/// Throws DomainError when K <= 2^d or beta falls outside (1, K/2^d), and
/// InputError for alpha outside (0,1) or non-positive n, K.
TwoNrqParams derive_params(double n, double k, std::size_t d, double alpha);

/// Guaranteed overlap volume min{1, (2r - s)^d}; 0 once s >= 2r.
double g_min_overlap(double s, double r, std::size_t d);

/// Exact volume of B_r(u) ∩ B_r(v) on the torus of side 2.
double nu_overlap(std::span<const double> u, std::span<const double> v, double r);
double nu_overlap(const TorusSpace& space, ItemId u, ItemId v, double r);

struct RadiusStep {
  double r = 0;
  bool explicit_formula = false;
};

/// Next radius of the schedule, or nullopt once the next step would drop
/// below min_radius().
std::optional<RadiusStep> solve_next_radius(const TwoNrqParams& params, double r_prev);

struct Schedule {
  std::vector<double> radii;            // r_0 = 1, ..., r_tau
  std::vector<double> rates;            // theta_t
  std::vector<bool> explicit_formula;   // per step; entry 0 is false
  std::size_t t_prime = 0;              // last step solved by the explicit formula
  std::size_t tau = 0;
};

Schedule compute_schedule(const TwoNrqParams& params);

/// t' + log(n alpha / K) / (d log(1/gamma*)).
double round_bound(const TwoNrqParams& params, std::size_t t_prime);

/// One round of the simulation: the undirected edge set E_t over a fixed
/// Poisson sample.
struct TwoNrqState {
  std::shared_ptr<const TorusSpace> space;
  std::vector<std::pair<ItemId, ItemId>> edges;  // lo < hi, sorted, unique
  std::size_t t = 0;
  std::uint64_t distance_evals = 0;

  std::size_t size() const noexcept { return space ? space->size() : 0; }
};

/// Neighbour lists of an edge set (sorted by id).
struct Adjacency {
  std::vector<std::size_t> offsets;
  std::vector<ItemId> targets;
  std::span<const ItemId> neighbors(ItemId v) const noexcept {
    return {targets.data() + offsets[v], offsets[v + 1] - offsets[v]};
  }
  std::size_t degree(ItemId v) const noexcept { return offsets[v + 1] - offsets[v]; }
};

Adjacency adjacency(const TwoNrqState& state);

/// E_0: every pair independently at rate K / n_mean.
TwoNrqState init_e0(std::shared_ptr<const TorusSpace> space, double k, double n_mean,
                    std::uint64_t seed);

/// E_{t+1} from E_t. Each hub proposes every pair of its neighbours; pairs
/// within r_t are accepted with probability g_value / nu_{r_prev}, one
/// counter-based coin per (pair, hub). Parallel over hubs; the result does
/// not depend on the thread count.
TwoNrqState range_query_round(const TwoNrqState& state, double r_t, double r_prev,
                              double g_value, std::uint64_t seed);

/// Single-threaded reference for range_query_round.
TwoNrqState range_query_round_serial(const TwoNrqState& state, double r_t, double r_prev,
                                     double g_value, std::uint64_t seed);

struct SamplingReport {
  std::size_t t = 0;
  double r_t = 0;
  double theta_t = 0;
  std::size_t edges = 0;
  std::size_t max_degree = 0;
  std::size_t sampled = 0;
  std::size_t edges_beyond = 0;  // over the whole edge set
  double rate_mean = 0;          // mean of deg(v) / |Q_t(v)|
  double rate_se = 0;
  double degree_mean = 0;
  double degree_se = 0;
  double expected_degree = 0;    // K
  double ks_statistic = 0;
  double ks_critical = 0;        // two-sided, 1% level
  bool rate_ok = false;
  bool degree_ok = false;
  bool uniform_ok = false;

  bool ok() const noexcept { return edges_beyond == 0 && rate_ok && degree_ok && uniform_ok; }
};

/// Measures the sampling property of E_t on `sample_size` random vertices
/// (all vertices if fewer).
SamplingReport verify_sampling_property(const TwoNrqState& state, double r_t, double theta_t,
                                        double expected_degree, std::size_t sample_size,
                                        std::uint64_t seed);

struct TwoNrqRun {
  TwoNrqParams params;
  Schedule schedule;
  TwoNrqState final_state;
  std::vector<SamplingReport> rounds;  // one per t = 0..tau
  std::uint64_t distance_evals = 0;
  double work_bound = 0;   // n K^2 (t' + log(n alpha/K) / (d log(1/gamma*)))
  double round_bound = 0;  // t' + log(n alpha/K) / (d log(1/gamma*))
};

TwoNrqRun run_2nrq(double n_mean, double k, std::size_t d, double alpha, std::uint64_t seed,
                   std::size_t sample_size = 1000);

}  // namespace nndlab
