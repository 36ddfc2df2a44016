#include "nndlab/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "nndlab/error.hpp"

namespace nndlab {

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_config_comment(std::ostream& out, const Json& config) {
  out << "# " << config.dump() << '\n';
}

namespace {

/// Data rows of a numeric CSV: comment lines and the header are skipped.
std::vector<std::vector<std::uint64_t>> read_rows(std::istream& in, std::size_t columns) {
  std::vector<std::vector<std::uint64_t>> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::uint64_t> row;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      const std::string_view cell = rest.substr(0, comma);
      std::uint64_t value = 0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
        throw InputError("malformed CSV cell: " + std::string(cell));
      }
      row.push_back(value);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (row.size() != columns) throw InputError("CSV row has the wrong number of columns");
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Rebuilds per-source lists from (source, rank, target) rows.
std::vector<std::vector<ItemId>> group_ranked(const std::vector<std::vector<std::uint64_t>>& rows,
                                              std::size_t n, std::size_t width) {
  std::vector<std::vector<ItemId>> lists(n, std::vector<ItemId>(width, 0));
  std::vector<std::size_t> filled(n, 0);
  for (const auto& r : rows) {
    if (r[0] >= n || r[1] < 1 || r[1] > width) throw InputError("CSV row out of range");
    lists[r[0]][r[1] - 1] = static_cast<ItemId>(r[2]);
    ++filled[r[0]];
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (filled[x] != width) throw InputError("CSV lists are incomplete");
  }
  return lists;
}

}  // namespace

void write_knn_csv(std::ostream& out, const KnnGraph& graph) {
  out << "source,rank,target\n";
  for (ItemId x = 0; x < graph.size(); ++x) {
    const auto nb = graph.neighbors(x);
    for (std::size_t r = 0; r < nb.size(); ++r) out << x << ',' << r + 1 << ',' << nb[r] << '\n';
  }
}

KnnGraph read_knn_csv(std::istream& in) {
  const auto rows = read_rows(in, 3);
  if (rows.empty()) throw InputError("empty K-NN CSV");
  std::size_t n = 0, k = 0;
  for (const auto& r : rows) {
    n = std::max<std::size_t>(n, r[0] + 1);
    k = std::max<std::size_t>(k, r[1]);
  }
  const auto lists = group_ranked(rows, n, k);
  std::vector<ItemId> flat;
  for (const auto& l : lists) flat.insert(flat.end(), l.begin(), l.end());
  return KnnGraph(n, k, std::move(flat));
}

Json knn_to_json(const KnnGraph& graph) {
  Json rows = Json::array();
  for (ItemId x = 0; x < graph.size(); ++x) {
    const auto nb = graph.neighbors(x);
    rows.push_back(std::vector<ItemId>(nb.begin(), nb.end()));
  }
  return {{"n", graph.size()}, {"k", graph.k()}, {"neighbors", std::move(rows)}};
}

KnnGraph knn_from_json(const Json& j) {
  const auto n = j.at("n").get<std::size_t>();
  const auto k = j.at("k").get<std::size_t>();
  const auto& rows = j.at("neighbors");
  if (rows.size() != n) throw InputError("neighbor rows do not match n");
  std::vector<ItemId> flat;
  flat.reserve(n * k);
  for (const auto& row : rows) {
    if (row.size() != k) throw InputError("neighbor row does not match K");
    for (const auto& v : row) flat.push_back(v.get<ItemId>());
  }
  return KnnGraph(n, k, std::move(flat));
}

Json space_to_json(const ParisSpace& space) {
  return {{"space", "paris"}, {"n", space.size()}, {"etas", space.etas}};
}

Json space_to_json(const CircleSpace& space) {
  return {{"space", "circle"},
          {"n_mean", space.n_mean},
          {"poissonized", space.poissonized},
          {"seed", space.seed},
          {"n", space.size()}};
}

Json space_to_json(const PowersOfTwoSpace& space) {
  return {{"space", "powers2"}, {"n", space.size()}};
}

Json space_to_json(const LcsSpace& space) {
  return {{"space", "lcs"}, {"n", space.size()}, {"m", space.m},
          {"mu", space.mu},  {"p", space.p},     {"seed", space.seed}};
}

Json space_to_json(const TorusSpace& space) {
  return {{"space", "torus"}, {"d", space.d}, {"n_mean", space.n_mean},
          {"seed", space.seed}, {"n", space.size()}};
}

void write_points_csv(std::ostream& out, const CircleSpace& space) {
  out << "id,angle\n";
  for (std::size_t i = 0; i < space.size(); ++i) out << i << ',' << format_double(space.angles[i]) << '\n';
}

void write_points_csv(std::ostream& out, const TorusSpace& space) {
  out << "id";
  for (std::size_t c = 0; c < space.d; ++c) out << ",x" << c;
  out << '\n';
  for (ItemId i = 0; i < space.size(); ++i) {
    out << i;
    for (double c : space.point(i)) out << ',' << format_double(c);
    out << '\n';
  }
}

Json nnd_report(const NndConfig& config, std::size_t n, const NndResult& result) {
  Json j = {{"mode", to_string(config.mode)},
            {"n", n},
            {"K", config.k},
            {"seed", config.seed},
            {"stop", to_string(config.stop)},
            {"rounds", result.rounds},
            {"converged", result.converged},
            {"comparisons", result.comparisons},
            {"recall", nullptr},
            {"changes_per_round", result.changes_per_round}};
  if (result.recall) {
    j["recall"] = *result.recall;
    j["recall_per_round"] = result.recall_per_round;
  }
  return j;
}

void write_order_csv(std::ostream& out, const LinearOrder& order) {
  const PairCodec codec(order.points());
  out << "sigma,pair_id,lo,hi\n";
  for (std::size_t pos = 1; pos <= order.pairs(); ++pos) {
    const Pair p = codec.decode(order.at(pos));
    out << pos << ',' << order.at(pos) << ',' << p.lo << ',' << p.hi << '\n';
  }
}

LinearOrder read_order_csv(std::istream& in, std::size_t n) {
  const auto rows = read_rows(in, 4);
  std::vector<PairIndex> sequence(rows.size());
  std::vector<bool> placed(rows.size(), false);
  for (const auto& r : rows) {
    if (r[0] < 1 || r[0] > rows.size() || placed[r[0] - 1]) throw InputError("bad sigma column");
    placed[r[0] - 1] = true;
    sequence[r[0] - 1] = static_cast<PairIndex>(r[1]);
  }
  return LinearOrder::from_sequence(n, std::move(sequence));
}

void write_rank_table_csv(std::ostream& out, const RankTable& table) {
  out << "point,rank,item\n";
  for (ItemId x = 0; x < table.size(); ++x) {
    const auto order = table.order(x);
    for (std::size_t r = 0; r < order.size(); ++r) out << x << ',' << r + 1 << ',' << order[r] << '\n';
  }
}

RankTable read_rank_table_csv(std::istream& in) {
  const auto rows = read_rows(in, 3);
  if (rows.empty()) throw InputError("empty rank table CSV");
  std::size_t n = 0;
  for (const auto& r : rows) n = std::max<std::size_t>(n, r[0] + 1);
  return RankTable::from_orders(group_ranked(rows, n, n - 1));
}

Json certificate_to_json(const Crs& crs) {
  Json j = {{"n", crs.table.size()}, {"concordant", crs.concordant()}};
  if (crs.concordant()) {
    Json edges = Json::array();
    for (const auto& [a, b] : crs.dag().edges()) edges.push_back({a, b});
    j["dag_edges"] = std::move(edges);
  } else {
    j["cycle"] = crs.cycle().cycle;
  }
  return j;
}

void write_embedding_csv(std::ostream& out, const EmbeddingMatrix& emb) {
  out << "point";
  for (std::size_t c = 0; c < emb.cols; ++c) out << ",c" << c + 1;
  out << '\n';
  for (std::size_t r = 0; r < emb.rows; ++r) {
    out << r;
    for (std::size_t c = 0; c < emb.cols; ++c) out << ',' << format_double(emb.at(r, c));
    out << '\n';
  }
}

Json census_to_json(const CrsCensus& c) {
  Json hist = Json::array();
  for (const auto& [size, count] : c.component_size_histogram) {
    hist.push_back({{"size", size}, {"count", count}});
  }
  return {{"n", c.n},
          {"pairs", c.pairs},
          {"orders", c.orders},
          {"distinct_images", c.distinct_images},
          {"all_concordant", c.all_concordant},
          {"components", c.components},
          {"components_match_classes", c.components_match_classes},
          {"component_sizes", std::move(hist)},
          {"white_edges", c.white_edges},
          {"total_edges", c.total_edges},
          {"white_fraction", static_cast<double>(c.white_edges) / static_cast<double>(c.total_edges)},
          {"mean_preimages", c.mean_preimages},
          {"lower_bound", c.lower_bound},
          {"upper_bound", c.upper_bound},
          {"bounds_hold", c.bounds_hold}};
}

Json fraction_to_json(const WhiteEdgeFraction& f) {
  return {{"exact", std::to_string(f.numerator) + "/" + std::to_string(f.denominator)},
          {"exact_value", f.exact},
          {"empirical", f.empirical},
          {"samples", f.samples}};
}

Json params_to_json(const TwoNrqParams& p) {
  return {{"n", p.n},
          {"K", p.k},
          {"d", p.d},
          {"alpha", p.alpha},
          {"beta", p.beta},
          {"gamma", p.gamma},
          {"gamma_star", p.gamma_star},
          {"alpha_gamma_d", p.alpha * std::pow(p.gamma, static_cast<double>(p.d))},
          {"t_prime_bound", p.t_prime_bound}};
}

void write_schedule_csv(std::ostream& out, const Schedule& s) {
  out << "t,r_t,theta_t,formula_used\n";
  for (std::size_t t = 0; t < s.radii.size(); ++t) {
    const char* formula = t == 0 ? "initial" : s.explicit_formula[t] ? "explicit" : "implicit";
    out << t << ',' << format_double(s.radii[t]) << ',' << format_double(s.rates[t]) << ','
        << formula << '\n';
  }
}

Json schedule_to_json(const Schedule& s) {
  Json steps = Json::array();
  for (std::size_t t = 0; t < s.radii.size(); ++t) {
    steps.push_back({{"t", t},
                     {"r_t", s.radii[t]},
                     {"theta_t", s.rates[t]},
                     {"formula_used", t == 0 ? "initial" : s.explicit_formula[t] ? "explicit" : "implicit"}});
  }
  return {{"t_prime", s.t_prime}, {"tau", s.tau}, {"steps", std::move(steps)}};
}

Json sampling_to_json(const SamplingReport& r) {
  return {{"t", r.t},
          {"r_t", r.r_t},
          {"theta_t", r.theta_t},
          {"edges", r.edges},
          {"max_degree", r.max_degree},
          {"sampled", r.sampled},
          {"edges_beyond", r.edges_beyond},
          {"rate_mean", r.rate_mean},
          {"rate_se", r.rate_se},
          {"rate_ok", r.rate_ok},
          {"degree_mean", r.degree_mean},
          {"degree_se", r.degree_se},
          {"degree_ok", r.degree_ok},
          {"ks_statistic", r.ks_statistic},
          {"ks_critical", r.ks_critical},
          {"uniform_ok", r.uniform_ok},
          {"ok", r.ok()}};
}

Json run_to_json(const TwoNrqRun& run) {
  Json rounds = Json::array();
  for (const auto& r : run.rounds) rounds.push_back(sampling_to_json(r));
  return {{"params", params_to_json(run.params)},
          {"schedule", schedule_to_json(run.schedule)},
          {"points", run.final_state.size()},
          {"rounds", std::move(rounds)},
          {"distance_evals", run.distance_evals},
          {"round_bound", run.round_bound},
          {"work_bound", run.work_bound}};
}

Json diameter_to_json(const DiameterReport& r) {
  return {{"n", r.n},
          {"K", r.k},
          {"trials", r.trials},
          {"epsilon", r.epsilon},
          {"seed", r.seed},
          {"bound", r.bound},
          {"diameters", r.diameters},
          {"disconnected", r.disconnected},
          {"fraction_within", r.fraction_within}};
}

void write_diameter_histogram_csv(std::ostream& out, const DiameterReport& r) {
  std::map<std::size_t, std::size_t> hist;
  for (std::size_t d : r.diameters) ++hist[d];
  out << "diameter,count\n";
  for (const auto& [d, c] : hist) out << d << ',' << c << '\n';
  if (r.disconnected > 0) out << "disconnected," << r.disconnected << '\n';
}

Json expansion_to_json(const ExpansionReport& r) {
  return {{"expansion_alpha", r.expansion_alpha},
          {"epsilon", r.epsilon},
          {"max_size", r.max_size},
          {"sample_sets", r.sample_sets},
          {"violations", r.violations},
          {"min_ratio", r.min_ratio},
          {"seed", r.seed}};
}

}  // namespace nndlab
