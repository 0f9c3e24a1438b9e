#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sdnet/sdnet.hpp"

using namespace sdnet;

namespace {

struct SpaceOptions {
  std::string family = "uniform";
  std::size_t dims = 2;
  std::size_t n = 1000;
  std::string metric = "euclidean";
  std::size_t clusters = kDefaultClusterCount;
  std::string alpha = "8";
  double mean_degree = 30.0;
  std::uint64_t seed = 0;
};

void add_space_options(CLI::App* cmd, SpaceOptions& o) {
  cmd->add_option("--space", o.family, "uniform | clusters | lognormal")->capture_default_str();
  cmd->add_option("--dims", o.dims, "dimensions of the social space")->capture_default_str();
  cmd->add_option("-n,--nodes", o.n, "number of agents")->capture_default_str();
  cmd->add_option("--metric", o.metric, "euclidean | manhattan")->capture_default_str();
  cmd->add_option("--clusters", o.clusters, "cluster count for the clusters space")->capture_default_str();
  cmd->add_option("--alpha", o.alpha, "homophily exponent, or inf")->capture_default_str();
  cmd->add_option("-k,--mean-degree", o.mean_degree, "target mean degree")->capture_default_str();
  cmd->add_option("--seed", o.seed, "master seed")->capture_default_str();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path + "'");
  return in;
}

struct Prepared {
  SocialSpace space;
  DistanceProvider provider;
  Alpha alpha;
  Calibration calibration;
};

Prepared prepare(const SpaceOptions& o) {
  const std::uint64_t space_seed = derive_seed(o.seed, "space");
  SocialSpace space = sample_space({parse_space_family(o.family), o.dims, o.n, space_seed, o.clusters});
  DistanceProvider provider = build_distance_provider(space, parse_metric(o.metric));
  const Alpha alpha = parse_alpha(o.alpha);
  const Calibration cal = calibrate_b(provider, alpha, o.mean_degree);
  return {std::move(space), std::move(provider), alpha, cal};
}

int run_generate(const SpaceOptions& o, const std::string& model_name, double p_rewire,
                 const std::string& degree_family, const std::string& degrees_in,
                 const std::string& degrees_out, const std::string& space_out,
                 double p_malformed, const std::string& out_path) {
  const ModelKind model = parse_model(model_name);
  const Prepared prep = prepare(o);
  if (!space_out.empty()) {
    auto out = open_out(space_out);
    write_space_csv(out, prep.space);
  }
  const ProbabilityMatrix probs =
      probability_matrix(prep.provider, {prep.alpha, prep.calibration.b, o.mean_degree});
  Graph graph;
  HeaderFields header{{"model", std::string(to_string(model))},
                      {"alpha", to_string(prep.alpha)},
                      {"b", format_double(prep.calibration.b)},
                      {"seed", std::to_string(o.seed)}};
  if (model == ModelKind::SDA) {
    graph = sample_graph(probs, derive_seed(o.seed, "sample"));
  } else {
    DegreeSequence seq;
    if (!degrees_in.empty()) {
      auto in = open_in(degrees_in);
      seq = read_degree_sequence(in);
      if (seq.size() != o.n) throw InvalidArgument("degree sequence length differs from --nodes");
    } else {
      seq = generate_degree_sequence(parse_degree_family(degree_family), o.n, o.mean_degree,
                                     derive_seed(o.seed, "degrees"));
    }
    if (!degrees_out.empty()) {
      auto out = open_out(degrees_out);
      write_degree_sequence(out, seq);
    }
    const MultiGraph mg = sdc_sample(probs, seq, {p_malformed, derive_seed(o.seed, "sdc")});
    SimplifyResult simple = simplify(mg);
    header.emplace_back("loops_removed", std::to_string(simple.loops_removed));
    header.emplace_back("parallel_removed", std::to_string(simple.parallel_removed));
    graph = std::move(simple.graph);
  }
  RewireStats stats;
  graph = rewire(graph, {p_rewire, derive_seed(o.seed, "rewire")}, &stats);
  header.emplace_back("p_rewire", format_double(p_rewire));
  if (out_path.empty() || out_path == "-") {
    write_edge_list(std::cout, graph, header);
  } else {
    auto out = open_out(out_path);
    write_edge_list(out, graph, header);
  }
  std::cerr << "nodes=" << graph.num_nodes() << " edges=" << graph.num_edges()
            << " b=" << format_double(prep.calibration.b) << '\n';
  return 0;
}

int run_calibrate(const SpaceOptions& o) {
  const Prepared prep = prepare(o);
  const Calibration& c = prep.calibration;
  std::cout << "b,expected_mean_degree,converged,expansions,iterations\n"
            << format_double(c.b) << ',' << format_double(c.mean_degree) << ','
            << (c.converged ? 1 : 0) << ',' << c.expansions << ',' << c.iterations << '\n';
  return c.converged ? 0 : 3;
}

int run_sweep_cmd(const std::string& config_path, const std::string& model, bool full_grid,
                  std::optional<std::uint64_t> seed, const std::string& out_dir, bool resume,
                  std::size_t workers) {
  ExperimentConfig cfg;
  if (!config_path.empty()) {
    auto in = open_in(config_path);
    cfg = config_from_json(nlohmann::json::parse(in));
  } else {
    cfg = full_grid ? full_config(parse_model(model)) : default_config(parse_model(model));
  }
  if (seed) cfg.master_seed = *seed;
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  const SweepSummary s = run_sweep(cfg, {.resume = resume, .workers = workers});
  std::cerr << "runs=" << s.total << " executed=" << s.executed << " skipped=" << s.skipped
            << " failed=" << s.failed << " results=" << s.results_path.string() << '\n';
  return s.failed == 0 ? 0 : 4;
}

int run_metrics(const std::string& path, std::optional<std::size_t> sources, std::uint64_t seed,
                const std::string& out_path) {
  auto in = open_in(path);
  const Graph g = read_edge_list(in);
  PathSampling paths = default_path_sampling(g.num_nodes(), seed);
  if (sources) paths = *sources == 0 ? PathSampling::exact() : PathSampling::sampled(*sources, seed);
  const MetricsReport r = compute_metrics(g, paths);
  if (out_path.empty() || out_path == "-") {
    std::cout << kMetricsCsvHeader << '\n' << to_csv_row(r) << '\n';
  } else {
    auto out = open_out(out_path);
    out << kMetricsCsvHeader << '\n' << to_csv_row(r) << '\n';
  }
  return 0;
}

int run_summarize(const std::string& path, const std::vector<std::string>& keys, std::size_t n_boot,
                  std::uint64_t seed, const std::string& out_path) {
  auto in = open_in(path);
  const csv::Table table = csv::read(in);
  const csv::Table summary = summarize(table, keys, n_boot, seed);
  if (out_path.empty() || out_path == "-") {
    csv::write(std::cout, summary);
  } else {
    auto out = open_out(out_path);
    csv::write(out, summary);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Homophily-driven social network generator"};
  app.require_subcommand(1);

  SpaceOptions gen_opts;
  std::string model = "sda";
  double p_rewire = 0.0;
  std::string degree_family = "poisson";
  std::string degrees_in, degrees_out, space_out, gen_out;
  double p_malformed = kDefaultMalformed;
  auto* gen = app.add_subcommand("generate", "sample one graph and write its edge list");
  add_space_options(gen, gen_opts);
  gen->add_option("--model", model, "sda | sdc")->capture_default_str();
  gen->add_option("--p-rewire", p_rewire, "rewiring probability")->capture_default_str();
  gen->add_option("--degrees", degree_family, "poisson | negbinom | powerlaw")->capture_default_str();
  gen->add_option("--degrees-in", degrees_in, "read the degree sequence from a file");
  gen->add_option("--degrees-out", degrees_out, "write the degree sequence");
  gen->add_option("--space-out", space_out, "write agent coordinates as CSV");
  gen->add_option("--p-malformed", p_malformed, "floor for zero probabilities")->capture_default_str();
  gen->add_option("-o,--out", gen_out, "edge list path (default stdout)");

  SpaceOptions cal_opts;
  auto* cal = app.add_subcommand("calibrate", "print the b that hits a target mean degree");
  add_space_options(cal, cal_opts);

  std::string config_path, sweep_model = "sda", sweep_out;
  bool full_grid = false, resume = false;
  std::optional<std::uint64_t> sweep_seed;
  std::size_t workers = 0;
  auto* sweep = app.add_subcommand("sweep", "run an experiment grid");
  sweep->add_option("-c,--config", config_path, "JSON config file");
  sweep->add_option("--model", sweep_model, "grid model when no config is given")->capture_default_str();
  sweep->add_flag("--full-grid", full_grid, "use N in {1000,2000,4000,8000}");
  sweep->add_option("--seed", sweep_seed, "master seed (overrides the config)");
  sweep->add_option("-o,--out", sweep_out, "output directory (overrides the config)");
  sweep->add_flag("--resume", resume, "skip runs already in results.csv");
  sweep->add_option("-j,--workers", workers, "worker threads (default SDNET_WORKERS or all cores)");

  std::string edge_path, metrics_out;
  std::optional<std::size_t> sources;
  std::uint64_t metrics_seed = 0;
  auto* met = app.add_subcommand("metrics", "structural metrics of an edge-list file");
  met->add_option("edges", edge_path, "edge-list file")->required();
  met->add_option("--sources", sources, "BFS sources for path length; 0 = exact");
  met->add_option("--seed", metrics_seed, "seed for source sampling")->capture_default_str();
  met->add_option("-o,--out", metrics_out, "CSV path (default stdout)");

  std::string results_path, summary_out;
  std::vector<std::string> keys{"model", "space", "dims", "n", "alpha", "p_rewire", "degree_family"};
  std::size_t n_boot = 100;
  std::uint64_t summary_seed = 0;
  auto* sum = app.add_subcommand("summarize", "group results and attach bootstrap bounds");
  sum->add_option("results", results_path, "results.csv from a sweep")->required();
  sum->add_option("--by", keys, "grouping columns")->delimiter(',')->capture_default_str();
  sum->add_option("--n-boot", n_boot, "bootstrap resamples")->capture_default_str();
  sum->add_option("--seed", summary_seed, "bootstrap seed")->capture_default_str();
  sum->add_option("-o,--out", summary_out, "CSV path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen)
      return run_generate(gen_opts, model, p_rewire, degree_family, degrees_in, degrees_out, space_out,
                          p_malformed, gen_out);
    if (*cal) return run_calibrate(cal_opts);
    if (*sweep)
      return run_sweep_cmd(config_path, sweep_model, full_grid, sweep_seed, sweep_out, resume, workers);
    if (*met) return run_metrics(edge_path, sources, metrics_seed, metrics_out);
    if (*sum) return run_summarize(results_path, keys, n_boot, summary_seed, summary_out);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
