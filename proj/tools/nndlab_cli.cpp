// nndlab: seeded experiment runner. Every output carries its full config.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <boost/crc.hpp>
#include <omp.h>

#include "nndlab/crs.hpp"
#include "nndlab/diagnostics.hpp"
#include "nndlab/error.hpp"
#include "nndlab/io.hpp"
#include "nndlab/nnd.hpp"
#include "nndlab/spaces.hpp"
#include "nndlab/twonrq.hpp"

namespace {

using namespace nndlab;

constexpr const char* kVersion = "0.1.0";
constexpr const char* kOutputDirEnv = "NNDLAB_OUTPUT_DIR";

enum Exit { ok = 0, usage = 2, precondition = 3, refused = 4 };

/// Counts are read as doubles so "1e7" works, then checked for integrality.
std::size_t as_count(double value, const char* name) {
  if (!(value >= 0.0) || value != std::floor(value) || value > 9.0e15) {
    throw CLI::ValidationError(std::string("--") + name, "expects a non-negative integer");
  }
  return static_cast<std::size_t>(value);
}

struct Output {
  std::string path;
  std::string format = "json";

  void emit(const std::string& experiment, const Json& config, const Json& data,
            const std::function<void(std::ostream&)>& csv) const {
    std::ofstream file;
    std::ostream* out = &std::cout;
    std::string target = path;
    if (target.empty()) {
      if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) {
        std::filesystem::create_directories(dir);
        target = (std::filesystem::path(dir) / (experiment + "." + format)).string();
      }
    }
    if (!target.empty()) {
      file.open(target);
      if (!file) throw InputError("cannot open output file " + target);
      out = &file;
    }
    if (format == "csv" && csv) {
      write_config_comment(*out, config);
      csv(*out);
    } else {
      *out << Json{{"config", config}, {"data", data}}.dump(2) << '\n';
    }
  }
};

std::string golden_schedule_checksum() {
  std::ostringstream csv;
  write_schedule_csv(csv, compute_schedule(derive_params(1e7, 28, 4, 0.5)));
  const std::string text = csv.str();
  boost::crc_32_type crc;
  crc.process_bytes(text.data(), text.size());
  std::ostringstream hex;
  hex << std::hex << crc.checksum();
  return hex.str();
}

// ---------------------------------------------------------------------------
// nnd

struct NndArgs {
  std::string space;
  double n = 0;
  double k = 0;
  std::string mode = "batch";
  std::string stop = "no_change";
  std::uint64_t seed = 0;
  double max_rounds = 0;
  bool no_cofriends = false;
  bool shuffle = false;
  double lcs_m = 32;
  double alphabet = 4;
  double exact_limit = 4096;
  std::string graph_out;
};

struct Instance {
  std::shared_ptr<const RankTable> table;  // set when n is small enough
  std::unique_ptr<RankingOracle> oracle;
};

Instance build_instance(const NndArgs& a, std::size_t n, std::size_t exact_limit) {
  Instance inst;
  const bool small = n <= exact_limit;
  const auto with_distance = [&](DistanceFn fn) {
    if (small) {
      inst.table = std::make_shared<const RankTable>(ranking_from_distances(n, fn));
      inst.oracle = std::make_unique<TableOracle>(inst.table);
    } else {
      inst.oracle = std::make_unique<DistanceOracle>(n, std::move(fn));
    }
  };
  const auto with_table = [&](RankTable table) {
    inst.table = std::make_shared<const RankTable>(std::move(table));
    inst.oracle = std::make_unique<TableOracle>(inst.table);
  };

  if (a.space == "paris") {
    auto space = std::make_shared<ParisSpace>(paris_arithmetic(n));
    with_distance([space](ItemId i, ItemId j) { return paris_distance(*space, i, j); });
  } else if (a.space == "circle") {
    auto space = std::make_shared<CircleSpace>(circle_sample(static_cast<double>(n), a.seed, false));
    with_distance([space](ItemId i, ItemId j) { return circle_distance(*space, i, j); });
  } else if (a.space == "powers2") {
    auto space = std::make_shared<PowersOfTwoSpace>(powers_of_two(n));
    with_distance([space](ItemId i, ItemId j) { return powers_of_two_distance(*space, i, j); });
  } else if (a.space == "lcs") {
    const std::size_t symbols = as_count(a.alphabet, "alphabet");
    const LcsSpace space =
        lcs_sample(n, as_count(a.lcs_m, "m"), std::vector<double>(symbols, 1.0), a.seed);
    with_table(lcs_ranking(space));
  } else if (a.space == "random-ranking") {
    with_table(random_ranking_table({n, a.seed}));
  } else {
    with_table(generic_crs(n, a.seed).table);
  }
  return inst;
}

void run_nnd_cmd(const NndArgs& a, const Output& out) {
  const std::size_t n = as_count(a.n, "n");
  NndConfig cfg;
  cfg.k = as_count(a.k, "k");
  cfg.mode = a.mode == "batch" ? NndMode::batch : NndMode::pointwise;
  cfg.stop = a.stop == "budget" ? StopRule::budget : StopRule::no_change;
  cfg.seed = a.seed;
  cfg.max_rounds = as_count(a.max_rounds, "max-rounds");
  cfg.include_cofriends = !a.no_cofriends;
  cfg.shuffle_schedule = a.shuffle;
  const std::size_t exact_limit = as_count(a.exact_limit, "exact-limit");

  Json config = {{"experiment", "nnd"},      {"space", a.space},
                 {"n", n},                   {"k", cfg.k},
                 {"mode", a.mode},           {"stop", a.stop},
                 {"seed", a.seed},           {"max_rounds", cfg.max_rounds},
                 {"include_cofriends", cfg.include_cofriends},
                 {"shuffle_schedule", cfg.shuffle_schedule},
                 {"exact_limit", exact_limit}};
  if (a.space == "lcs") {
    config["m"] = as_count(a.lcs_m, "m");
    config["alphabet"] = as_count(a.alphabet, "alphabet");
  }

  const Instance inst = build_instance(a, n, exact_limit);
  std::optional<KnnGraph> exact;
  if (inst.table) exact = exact_knn(*inst.table, cfg.k);
  const NndResult result = run_nnd(*inst.oracle, cfg, exact ? &*exact : nullptr);

  if (!a.graph_out.empty()) {
    std::ofstream g(a.graph_out);
    if (!g) throw InputError("cannot open graph output " + a.graph_out);
    write_config_comment(g, config);
    write_knn_csv(g, result.graph);
  }
  out.emit("nnd", config, nnd_report(cfg, n, result), [&](std::ostream& os) {
    os << "round,changed,recall\n";
    for (std::size_t r = 0; r < result.rounds; ++r) {
      os << r + 1 << ',' << result.changes_per_round[r] << ',';
      if (exact) os << format_double(result.recall_per_round[r]);
      os << '\n';
    }
  });
}

// ---------------------------------------------------------------------------
// 2nrq

struct TwoNrqArgs {
  double n = 1e7;
  double k = 28;
  double d = 4;
  double alpha = 0.5;
  std::uint64_t seed = 0;
  double sample = 1000;
};

void run_schedule_cmd(const TwoNrqArgs& a, const Output& out) {
  const TwoNrqParams p = derive_params(a.n, a.k, as_count(a.d, "d"), a.alpha);
  const Schedule s = compute_schedule(p);
  const Json config = {{"experiment", "2nrq-schedule"}, {"n", a.n}, {"k", a.k},
                       {"d", p.d}, {"alpha", a.alpha}};
  out.emit("2nrq-schedule", config, {{"params", params_to_json(p)}, {"schedule", schedule_to_json(s)}},
           [&](std::ostream& os) { write_schedule_csv(os, s); });
}

void run_simulate_cmd(const TwoNrqArgs& a, const Output& out) {
  const std::size_t d = as_count(a.d, "d");
  const std::size_t sample = as_count(a.sample, "sample");
  const TwoNrqRun run = run_2nrq(a.n, a.k, d, a.alpha, a.seed, sample);
  const Json config = {{"experiment", "2nrq-simulate"}, {"n", a.n}, {"k", a.k}, {"d", d},
                       {"alpha", a.alpha}, {"seed", a.seed}, {"sample", sample}};
  out.emit("2nrq-simulate", config, run_to_json(run), [&](std::ostream& os) {
    os << "t,r_t,theta_t,edges,rate_mean,rate_se,degree_mean,degree_se,ks_statistic,ks_critical,"
          "edges_beyond,ok\n";
    for (const auto& r : run.rounds) {
      os << r.t << ',' << format_double(r.r_t) << ',' << format_double(r.theta_t) << ','
         << r.edges << ',' << format_double(r.rate_mean) << ',' << format_double(r.rate_se) << ','
         << format_double(r.degree_mean) << ',' << format_double(r.degree_se) << ','
         << format_double(r.ks_statistic) << ',' << format_double(r.ks_critical) << ','
         << r.edges_beyond << ',' << (r.ok() ? "true" : "false") << '\n';
    }
  });
}

// ---------------------------------------------------------------------------
// crs

struct CrsArgs {
  double n = 4;
  std::string example;
  std::uint64_t seed = 0;
  std::string kind;
  std::string check = "isolated";
  double cap = 10000;
  double samples = 100000;
};

void run_enumerate_cmd(const CrsArgs& a, const Output& out) {
  const std::size_t n = as_count(a.n, "n");
  const CrsCensus census = enumerate_small(n);
  const Json config = {{"experiment", "crs-enumerate"}, {"n", n}};
  out.emit("crs-enumerate", config, census_to_json(census), [&](std::ostream& os) {
    os << "component_size,count\n";
    for (const auto& [size, count] : census.component_size_histogram) {
      os << size << ',' << count << '\n';
    }
  });
}

void run_embed_cmd(const CrsArgs& a, const Output& out) {
  Json config = {{"experiment", "crs-embed"}};
  EmbeddingMatrix emb;
  Crs crs;
  if (!a.example.empty()) {
    config["example"] = a.example;
    crs = concordancy_check(concordant5_table());
    emb = linf_embed(crs, concordant5_extension());
  } else {
    const std::size_t n = as_count(a.n, "n");
    config["n"] = n;
    config["seed"] = a.seed;
    crs = generic_crs(n, a.seed);
    emb = linf_embed(crs, a.seed);
  }
  Json rows = Json::array();
  for (std::size_t r = 0; r < emb.rows; ++r) {
    rows.push_back(std::vector<double>(emb.coords.begin() + r * emb.cols,
                                       emb.coords.begin() + (r + 1) * emb.cols));
  }
  const Json data = {{"verified", verify_embedding(crs, emb)},
                     {"matrix", std::move(rows)},
                     {"certificate", certificate_to_json(crs)}};
  out.emit("crs-embed", config, data, [&](std::ostream& os) { write_embedding_csv(os, emb); });
}

void run_special_cmd(const CrsArgs& a, const Output& out) {
  const std::size_t n = as_count(a.n, "n");
  const std::size_t cap = as_count(a.cap, "cap");
  LinearOrder order;
  if (a.kind == "powers2") {
    order = powers_of_two_order(n);
  } else if (a.kind == "baranyai") {
    order = baranyai_order(n);
  } else {
    order = eulerian_order(n);
  }
  Json config = {{"experiment", "crs-special"}, {"kind", a.kind}, {"n", n}, {"check", a.check}};
  Json data = {{"kind", a.kind}, {"n", n}};
  if (a.check == "isolated") {
    const bool isolated = is_isolated(order);
    data["isolated"] = isolated;
    std::cerr << "isolated: " << (isolated ? "true" : "false") << '\n';
  } else {
    config["cap"] = cap;
    const WhiteComponent comp = white_component(order, cap);
    const Crs image = phi(order);
    bool same = true;
    for (const auto& member : comp.members) same = same && phi(member).table == image.table;
    data["component_size"] = comp.members.size();
    data["partial"] = comp.partial;
    data["all_phi_equal"] = same;
  }
  Json seq = Json::array();
  for (PairIndex p : order.sequence()) seq.push_back(p);
  data["order"] = std::move(seq);
  out.emit("crs-special", config, data, [&](std::ostream& os) { write_order_csv(os, order); });
}

void run_fraction_cmd(const CrsArgs& a, const Output& out) {
  const std::size_t n = as_count(a.n, "n");
  const std::size_t samples = as_count(a.samples, "samples");
  const WhiteEdgeFraction f = white_edge_fraction(n, samples, a.seed);
  const Json config = {{"experiment", "crs-fraction"}, {"n", n}, {"samples", samples},
                       {"seed", a.seed}};
  out.emit("crs-fraction", config, fraction_to_json(f), [&](std::ostream& os) {
    os << "n,exact,exact_value,empirical,samples\n"
       << n << ',' << f.numerator << '/' << f.denominator << ',' << format_double(f.exact) << ','
       << format_double(f.empirical) << ',' << samples << '\n';
  });
}

// ---------------------------------------------------------------------------
// diag

struct DiagArgs {
  double n = 10000;
  double k = 3;
  double trials = 50;
  double eps = 0.5;
  double alpha = 0.05;
  double sets = 10000;
  std::uint64_t seed = 0;
};

void run_diameter_cmd(const DiagArgs& a, const Output& out) {
  const std::size_t n = as_count(a.n, "n");
  const std::size_t k = as_count(a.k, "k");
  const std::size_t trials = as_count(a.trials, "trials");
  const DiameterReport rep = diameter_experiment(n, k, trials, a.eps, a.seed);
  const Json config = {{"experiment", "diag-diameter"}, {"n", n}, {"k", k},
                       {"trials", trials}, {"eps", a.eps}, {"seed", a.seed}};
  out.emit("diag-diameter", config, diameter_to_json(rep),
           [&](std::ostream& os) { write_diameter_histogram_csv(os, rep); });
}

void run_expansion_cmd(const DiagArgs& a, const Output& out) {
  const std::size_t n = as_count(a.n, "n");
  const std::size_t k = as_count(a.k, "k");
  const std::size_t sets = as_count(a.sets, "sets");
  const KnnGraph graph = init_random_kout(n, k, a.seed).to_graph();
  const ExpansionReport rep = expansion_check(graph, a.alpha, a.eps, sets, a.seed);
  const Json config = {{"experiment", "diag-expansion"}, {"n", n}, {"k", k}, {"alpha", a.alpha},
                       {"eps", a.eps}, {"sets", sets}, {"seed", a.seed}};
  Json data = expansion_to_json(rep);
  data["proof_alpha"] = expansion_proof_alpha(k, a.eps);
  out.emit("diag-expansion", config, data, [&](std::ostream& os) {
    os << "max_size,sample_sets,violations,min_ratio\n"
       << rep.max_size << ',' << rep.sample_sets << ',' << rep.violations << ','
       << format_double(rep.min_ratio) << '\n';
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nndlab: nearest-neighbor descent, concordant ranking systems and 2NRQ experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", [] {
    return std::string("nndlab ") + kVersion + " (golden schedule crc32 " +
           golden_schedule_checksum() + ")";
  });

  Output out;
  int threads = 0;
  app.add_option("--threads", threads, "Cap on worker threads (results do not depend on it)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("-o,--out", out.path,
                 std::string("Output file (default: stdout, or $") + kOutputDirEnv + "/<name>)");
  app.add_option("--format", out.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));

  std::function<void()> action;

  NndArgs nnd_args;
  auto* nnd = app.add_subcommand("nnd", "Run NND on an example space and report recall");
  nnd->add_option("--space", nnd_args.space, "Example space")
      ->required()
      ->check(CLI::IsMember({"paris", "circle", "powers2", "lcs", "random-ranking", "generic-crs"}));
  nnd->add_option("--n", nnd_args.n, "Number of points")->required();
  nnd->add_option("--k", nnd_args.k, "Neighbors per point")->required();
  nnd->add_option("--mode", nnd_args.mode)->check(CLI::IsMember({"batch", "pointwise"}));
  nnd->add_option("--stop", nnd_args.stop)->check(CLI::IsMember({"no_change", "budget"}));
  nnd->add_option("--seed", nnd_args.seed);
  nnd->add_option("--max-rounds", nnd_args.max_rounds, "0 = ceil(2 log_K n)");
  nnd->add_flag("--no-cofriends", nnd_args.no_cofriends, "Batch mode: ignore cofriends");
  nnd->add_flag("--shuffle", nnd_args.shuffle, "Pointwise mode: seeded schedule");
  nnd->add_option("--m", nnd_args.lcs_m, "LCS string length");
  nnd->add_option("--alphabet", nnd_args.alphabet, "LCS alphabet size (uniform)");
  nnd->add_option("--exact-limit", nnd_args.exact_limit, "Largest n with an exact K-NN graph");
  nnd->add_option("--graph", nnd_args.graph_out, "Also write the final graph as CSV");
  nnd->callback([&] { action = [&] { run_nnd_cmd(nnd_args, out); }; });

  TwoNrqArgs schedule_args;
  TwoNrqArgs simulate_args{2e4, 12, 2, 0.5, 0, 1000};
  auto* nrq = app.add_subcommand("2nrq", "Second-neighbor range query on the torus");
  nrq->require_subcommand(1);
  nrq->fallthrough();
  const auto add_common = [](CLI::App* sub, TwoNrqArgs& args) {
    sub->add_option("--n", args.n, "Mean number of points");
    sub->add_option("--k", args.k, "Target mean degree");
    sub->add_option("--d", args.d, "Dimension");
    sub->add_option("--alpha", args.alpha, "Maximal success rate");
  };
  auto* schedule = nrq->add_subcommand("schedule", "Radius schedule (no simulation)");
  add_common(schedule, schedule_args);
  schedule->callback([&] { action = [&] { run_schedule_cmd(schedule_args, out); }; });
  auto* simulate = nrq->add_subcommand("simulate", "Monte Carlo run with sampling checks");
  add_common(simulate, simulate_args);
  simulate->add_option("--seed", simulate_args.seed);
  simulate->add_option("--sample", simulate_args.sample, "Vertices sampled per round");
  simulate->callback([&] { action = [&] { run_simulate_cmd(simulate_args, out); }; });

  CrsArgs crs_args;
  auto* crs = app.add_subcommand("crs", "Concordant ranking systems");
  crs->require_subcommand(1);
  crs->fallthrough();
  auto* enumerate = crs->add_subcommand("enumerate", "Census of all linear orders (n <= 5)");
  enumerate->add_option("--n", crs_args.n)->required();
  enumerate->callback([&] { action = [&] { run_enumerate_cmd(crs_args, out); }; });
  auto* embed = crs->add_subcommand("embed", "l_inf embedding of a concordant system");
  auto* example = embed->add_option("--example", crs_args.example)
                      ->check(CLI::IsMember({"concordant5"}));
  embed->add_option("--n", crs_args.n, "Generic system size")->excludes(example);
  embed->add_option("--seed", crs_args.seed);
  embed->callback([&] { action = [&] { run_embed_cmd(crs_args, out); }; });
  auto* special = crs->add_subcommand("special", "Special linear orders");
  special->add_option("--kind", crs_args.kind)
      ->required()
      ->check(CLI::IsMember({"powers2", "baranyai", "eulerian"}));
  special->add_option("--n", crs_args.n)->required();
  special->add_option("--check", crs_args.check)->check(CLI::IsMember({"isolated", "component"}));
  special->add_option("--cap", crs_args.cap, "White component exploration cap");
  special->callback([&] { action = [&] { run_special_cmd(crs_args, out); }; });
  auto* fraction = crs->add_subcommand("fraction", "White-edge fraction, exact and sampled");
  fraction->add_option("--n", crs_args.n)->required();
  fraction->add_option("--samples", crs_args.samples);
  fraction->add_option("--seed", crs_args.seed);
  fraction->callback([&] { action = [&] { run_fraction_cmd(crs_args, out); }; });

  DiagArgs diameter_args;
  auto* diag = app.add_subcommand("diag", "Random K-out graph diagnostics");
  diag->require_subcommand(1);
  diag->fallthrough();
  auto* diameter = diag->add_subcommand("diameter", "Diameter experiment");
  diameter->add_option("--n", diameter_args.n);
  diameter->add_option("--k", diameter_args.k);
  diameter->add_option("--trials", diameter_args.trials);
  diameter->add_option("--eps", diameter_args.eps);
  diameter->add_option("--seed", diameter_args.seed);
  diameter->callback([&] { action = [&] { run_diameter_cmd(diameter_args, out); }; });

  DiagArgs expansion_args;
  expansion_args.eps = 1.0;
  auto* expansion = diag->add_subcommand("expansion", "Vertex expansion check");
  expansion->add_option("--n", expansion_args.n);
  expansion->add_option("--k", expansion_args.k)->required();
  expansion->add_option("--alpha", expansion_args.alpha, "Set sizes stay below alpha n / ln n");
  expansion->add_option("--eps", expansion_args.eps);
  expansion->add_option("--sets", expansion_args.sets);
  expansion->add_option("--seed", expansion_args.seed);
  expansion->callback([&] { action = [&] { run_expansion_cmd(expansion_args, out); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return Exit::usage;
  }

  if (threads > 0) omp_set_num_threads(threads);
  try {
    if (action) action();
    return Exit::ok;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return Exit::usage;
  } catch (const ResourceRefusal& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return Exit::refused;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return Exit::precondition;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return Exit::precondition;
  }
}
