#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "sdnet/csv.hpp"
#include "sdnet/error.hpp"
#include "sdnet/graph.hpp"
#include "sdnet/metrics.hpp"
#include "sdnet/parallel.hpp"
#include "sdnet/rng.hpp"
#include "sdnet/sda.hpp"
#include "sdnet/sdc.hpp"
#include "sdnet/social_space.hpp"

namespace sdnet {

enum class ModelKind { SDA, SDC };

inline std::string_view to_string(ModelKind model) { return model == ModelKind::SDA ? "sda" : "sdc"; }

inline ModelKind parse_model(std::string_view name) {
  if (name == "sda" || name == "SDA") return ModelKind::SDA;
  if (name == "sdc" || name == "SDC") return ModelKind::SDC;
  throw InvalidArgument("unknown model '" + std::string(name) + "'");
}

inline constexpr double kSdcRewire = 0.01;

struct ExperimentConfig {
  ModelKind model = ModelKind::SDA;
  std::vector<SpaceFamily> spaces{SpaceFamily::Uniform, SpaceFamily::GaussianClusters,
                                  SpaceFamily::Lognormal};
  std::vector<std::size_t> dims{1, 2, 4, 8, 16};
  std::vector<std::size_t> sizes{250, 500, 1000, 2000};
  std::vector<Alpha> alphas{Alpha(2), Alpha(4), Alpha(8), Alpha::infinite()};
  double target_mean_degree = 30.0;
  std::vector<double> p_rewire{0.0, 0.01};
  std::vector<DegreeFamily> degree_families{};  // SDC only
  std::size_t spaces_per_cell = 2;
  std::size_t graphs_per_space = 5;
  std::size_t n_boot = 100;
  std::uint64_t master_seed = 0;
  std::string output_dir = "results";
  Metric metric = Metric::Euclidean;
  double p_malformed = kDefaultMalformed;
  std::size_t cluster_count = kDefaultClusterCount;
  /// nullopt: exact below 4000 nodes, 512 sources above. 0: always exact.
  std::optional<std::size_t> path_sources;
  std::uint64_t memory_cap = kDefaultMemoryCap;
};

/// Desk-scale grid: N in {250, 500, 1000, 2000}.
inline ExperimentConfig default_config(ModelKind model) {
  ExperimentConfig cfg;
  cfg.model = model;
  if (model == ModelKind::SDC) {
    cfg.p_rewire = {kSdcRewire};
    cfg.degree_families = {DegreeFamily::Poisson, DegreeFamily::NegativeBinomial,
                           DegreeFamily::PowerLaw};
    cfg.graphs_per_space = 6;
  }
  return cfg;
}

/// Full-scale grid: N in {1000, 2000, 4000, 8000}.
inline ExperimentConfig full_config(ModelKind model) {
  ExperimentConfig cfg = default_config(model);
  cfg.sizes = {1000, 2000, 4000, 8000};
  return cfg;
}

inline void validate(const ExperimentConfig& cfg) {
  detail::require(!cfg.spaces.empty() && !cfg.dims.empty() && !cfg.sizes.empty() &&
                      !cfg.alphas.empty() && !cfg.p_rewire.empty(),
                  "config: parameter lists must be nonempty");
  detail::require(cfg.model == ModelKind::SDA || !cfg.degree_families.empty(),
                  "config: SDC needs at least one degree family");
  detail::require(cfg.spaces_per_cell >= 1 && cfg.graphs_per_space >= 1,
                  "config: replicate counts must be >= 1");
  detail::require(cfg.n_boot >= 1, "config: n_boot must be >= 1");
  detail::require(cfg.target_mean_degree > 0.0, "config: target mean degree must be > 0");
  for (double p : cfg.p_rewire)
    detail::require(p >= 0.0 && p <= 1.0, "config: p_rewire must lie in [0,1]");
  detail::require(cfg.p_malformed > 0.0 && cfg.p_malformed < 1.0,
                  "config: p_malformed must lie in (0,1)");
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  const ModelKind model = parse_model(j.value("model", std::string("sda")));
  ExperimentConfig cfg = default_config(model);
  static const std::set<std::string> known{
      "model",         "spaces",        "dims",           "sizes",       "alphas",
      "target_mean_degree", "p_rewire", "degree_families", "spaces_per_cell",
      "graphs_per_space", "n_boot",     "master_seed",    "output_dir",  "metric",
      "p_malformed",   "cluster_count", "path_sources",   "memory_cap_bytes"};
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) throw InvalidArgument("config: unknown key '" + key + "'");

  if (j.contains("spaces")) {
    cfg.spaces.clear();
    for (const auto& s : j.at("spaces")) cfg.spaces.push_back(parse_space_family(s.get<std::string>()));
  }
  if (j.contains("dims")) cfg.dims = j.at("dims").get<std::vector<std::size_t>>();
  if (j.contains("sizes")) cfg.sizes = j.at("sizes").get<std::vector<std::size_t>>();
  if (j.contains("alphas")) {
    cfg.alphas.clear();
    for (const auto& a : j.at("alphas"))
      cfg.alphas.push_back(a.is_string() ? parse_alpha(a.get<std::string>()) : Alpha(a.get<double>()));
  }
  if (j.contains("degree_families")) {
    cfg.degree_families.clear();
    for (const auto& d : j.at("degree_families"))
      cfg.degree_families.push_back(parse_degree_family(d.get<std::string>()));
  }
  cfg.target_mean_degree = j.value("target_mean_degree", cfg.target_mean_degree);
  if (j.contains("p_rewire")) cfg.p_rewire = j.at("p_rewire").get<std::vector<double>>();
  cfg.spaces_per_cell = j.value("spaces_per_cell", cfg.spaces_per_cell);
  cfg.graphs_per_space = j.value("graphs_per_space", cfg.graphs_per_space);
  cfg.n_boot = j.value("n_boot", cfg.n_boot);
  cfg.master_seed = j.value("master_seed", cfg.master_seed);
  cfg.output_dir = j.value("output_dir", cfg.output_dir);
  if (j.contains("metric")) cfg.metric = parse_metric(j.at("metric").get<std::string>());
  cfg.p_malformed = j.value("p_malformed", cfg.p_malformed);
  cfg.cluster_count = j.value("cluster_count", cfg.cluster_count);
  if (j.contains("path_sources") && !j.at("path_sources").is_null())
    cfg.path_sources = j.at("path_sources").get<std::size_t>();
  cfg.memory_cap = j.value("memory_cap_bytes", cfg.memory_cap);
  validate(cfg);
  return cfg;
}

inline nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["model"] = to_string(cfg.model);
  for (auto s : cfg.spaces) j["spaces"].push_back(to_string(s));
  j["dims"] = cfg.dims;
  j["sizes"] = cfg.sizes;
  for (auto a : cfg.alphas) {
    if (a.is_infinite())
      j["alphas"].push_back("inf");
    else
      j["alphas"].push_back(a.value());
  }
  j["target_mean_degree"] = cfg.target_mean_degree;
  j["p_rewire"] = cfg.p_rewire;
  j["degree_families"] = nlohmann::json::array();
  for (auto d : cfg.degree_families) j["degree_families"].push_back(to_string(d));
  j["spaces_per_cell"] = cfg.spaces_per_cell;
  j["graphs_per_space"] = cfg.graphs_per_space;
  j["n_boot"] = cfg.n_boot;
  j["master_seed"] = cfg.master_seed;
  j["output_dir"] = cfg.output_dir;
  j["metric"] = to_string(cfg.metric);
  j["p_malformed"] = cfg.p_malformed;
  j["cluster_count"] = cfg.cluster_count;
  j["path_sources"] = cfg.path_sources ? nlohmann::json(*cfg.path_sources) : nlohmann::json();
  j["memory_cap_bytes"] = cfg.memory_cap;
  return j;
}

/// One cell of the grid at one replicate.
struct RunDescriptor {
  std::size_t index = 0;
  ModelKind model = ModelKind::SDA;
  SpaceFamily space = SpaceFamily::Uniform;
  std::size_t dims = 1;
  std::size_t n = 2;
  Alpha alpha{2.0};
  double target_mean_degree = 30.0;
  double p_rewire = 0.0;
  std::optional<DegreeFamily> degree_family;
  std::size_t space_rep = 0;
  std::size_t graph_rep = 0;
  std::uint64_t space_seed = 0;
  std::uint64_t graph_seed = 0;

  Metric metric = Metric::Euclidean;
  double p_malformed = kDefaultMalformed;
  std::size_t cluster_count = kDefaultClusterCount;
  std::optional<std::size_t> path_sources;
  std::uint64_t memory_cap = kDefaultMemoryCap;

  /// Canonical parameter string; the seed-derivation key.
  std::string cell_key() const {
    return "model=" + std::string(to_string(model)) + ";space=" + std::string(to_string(space)) +
           ";dims=" + std::to_string(dims) + ";n=" + std::to_string(n) +
           ";alpha=" + to_string(alpha) + ";k=" + format_double(target_mean_degree) +
           ";p_rewire=" + format_double(p_rewire) + ";degree=" +
           std::string(degree_family ? to_string(*degree_family) : "none") +
           ";metric=" + std::string(to_string(metric));
  }
  std::string run_key() const {
    return cell_key() + ";space_rep=" + std::to_string(space_rep) +
           ";graph_rep=" + std::to_string(graph_rep);
  }
};

/// Seeds: space = derive_seed(master, cell_key, space_rep);
/// graph = derive_seed(master, cell_key, space_rep, graph_rep).
inline void assign_seeds(RunDescriptor& d, std::uint64_t master_seed) {
  const std::string key = d.cell_key();
  d.space_seed = derive_seed(master_seed, key, d.space_rep);
  d.graph_seed = derive_seed(master_seed, key, d.space_rep, d.graph_rep);
}

/// Cartesian product in the order N, space, dims, alpha, p_rewire, degree
/// family, space replicate, graph replicate.
inline std::vector<RunDescriptor> expand_grid(const ExperimentConfig& cfg) {
  validate(cfg);
  std::vector<std::optional<DegreeFamily>> families;
  if (cfg.model == ModelKind::SDA)
    families.push_back(std::nullopt);
  else
    for (auto f : cfg.degree_families) families.push_back(f);

  std::vector<RunDescriptor> runs;
  for (std::size_t n : cfg.sizes)
    for (SpaceFamily space : cfg.spaces)
      for (std::size_t m : cfg.dims)
        for (Alpha alpha : cfg.alphas)
          for (double p : cfg.p_rewire)
            for (const auto& family : families)
              for (std::size_t s = 0; s < cfg.spaces_per_cell; ++s)
                for (std::size_t g = 0; g < cfg.graphs_per_space; ++g) {
                  RunDescriptor d;
                  d.index = runs.size();
                  d.model = cfg.model;
                  d.space = space;
                  d.dims = m;
                  d.n = n;
                  d.alpha = alpha;
                  d.target_mean_degree = cfg.target_mean_degree;
                  d.p_rewire = p;
                  d.degree_family = family;
                  d.space_rep = s;
                  d.graph_rep = g;
                  d.metric = cfg.metric;
                  d.p_malformed = cfg.p_malformed;
                  d.cluster_count = cfg.cluster_count;
                  d.path_sources = cfg.path_sources;
                  d.memory_cap = cfg.memory_cap;
                  assign_seeds(d, cfg.master_seed);
                  runs.push_back(std::move(d));
                }
  if (runs.empty()) throw InvalidArgument("expand_grid: empty parameter product");
  return runs;
}

struct RunRecord {
  RunDescriptor descriptor;
  bool ok = false;
  std::string error;
  double b = 0.0;
  double expected_mean_degree = 0.0;
  bool calibration_converged = false;
  // SDC only: stub accounting before simplification.
  std::uint64_t sequence_sum = 0;
  std::uint64_t multigraph_degree_sum = 0;
  bool degrees_match = false;
  std::size_t loops_removed = 0;
  std::size_t parallel_removed = 0;
  std::size_t multigraph_edges = 0;
  RewireStats rewiring;
  MetricsReport metrics;
  double wall_seconds = 0.0;
};

/// Everything run_one builds on the way to its record, for callers that need
/// more than the metrics.
struct RunArtifacts {
  std::optional<Graph> graph;
  std::optional<DegreeSequence> sequence;
};

/// SDA: space -> distances -> calibrate b -> probabilities -> sample ->
/// rewire -> metrics. SDC: the same up to probabilities, then degree
/// sequence -> stub matching -> simplify -> rewire -> metrics. Errors are
/// captured in the record.
inline RunRecord run_one(const RunDescriptor& d, RunArtifacts* artifacts = nullptr) {
  RunRecord rec;
  rec.descriptor = d;
  const auto start = std::chrono::steady_clock::now();
  try {
    const SocialSpace space =
        sample_space({d.space, d.dims, d.n, d.space_seed, d.cluster_count});
    const DistanceProvider provider = build_distance_provider(space, d.metric, d.memory_cap);
    const Calibration cal = calibrate_b(provider, d.alpha, d.target_mean_degree, d.memory_cap);
    rec.b = cal.b;
    rec.expected_mean_degree = cal.mean_degree;
    rec.calibration_converged = cal.converged;
    const ProbabilityMatrix probs =
        probability_matrix(provider, {d.alpha, cal.b, d.target_mean_degree}, d.memory_cap);

    Graph graph;
    if (d.model == ModelKind::SDA) {
      graph = sample_graph(probs, derive_seed(d.graph_seed, "sample"));
    } else {
      if (!d.degree_family) throw InvalidArgument("run_one: SDC run without a degree family");
      DegreeSequence seq = generate_degree_sequence(*d.degree_family, d.n, d.target_mean_degree,
                                                    derive_seed(d.graph_seed, "degrees"));
      const MultiGraph mg = sdc_sample(probs, seq, {d.p_malformed, derive_seed(d.graph_seed, "sdc")});
      rec.sequence_sum = seq.sum();
      const auto realized = mg.degrees();
      rec.multigraph_degree_sum = 2 * static_cast<std::uint64_t>(mg.num_edges());
      rec.degrees_match = realized == seq.degrees;
      rec.multigraph_edges = mg.num_edges();
      SimplifyResult simple = simplify(mg);
      rec.loops_removed = simple.loops_removed;
      rec.parallel_removed = simple.parallel_removed;
      graph = std::move(simple.graph);
      if (artifacts) artifacts->sequence = std::move(seq);
    }
    graph = rewire(graph, {d.p_rewire, derive_seed(d.graph_seed, "rewire")}, &rec.rewiring);

    const std::uint64_t path_seed = derive_seed(d.graph_seed, "paths");
    PathSampling paths = default_path_sampling(d.n, path_seed);
    if (d.path_sources)
      paths = *d.path_sources == 0 ? PathSampling::exact()
                                   : PathSampling::sampled(*d.path_sources, path_seed);
    rec.metrics = compute_metrics(graph, paths);
    if (artifacts) artifacts->graph = std::move(graph);
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

inline const std::vector<std::string>& results_header() {
  static const std::vector<std::string> header{
      "run_key",       "model",          "space",          "dims",
      "n",             "alpha",          "target_mean_degree", "p_rewire",
      "degree_family", "space_rep",      "graph_rep",      "space_seed",
      "graph_seed",    "status",         "error",          "b",
      "expected_mean_degree", "calibration_converged", "sequence_sum", "multigraph_degree_sum",
      "degrees_match", "multigraph_edges", "loops_removed", "parallel_removed",
      "rewired",       "rewire_skipped", "n_nodes",        "n_edges",
      "mean_degree",   "clustering",     "assortativity",  "avg_path_length",
      "gini",          "lcc_fraction",   "wall_seconds"};
  return header;
}

/// Columns that depend on timing rather than on seeds.
inline constexpr std::string_view kWallTimeColumn = "wall_seconds";

inline std::vector<std::string> to_csv_fields(const RunRecord& r) {
  const RunDescriptor& d = r.descriptor;
  const bool sdc = d.model == ModelKind::SDC;
  const MetricsReport& m = r.metrics;
  auto num = [](double v) { return format_double(v); };
  auto opt = [&](bool present, auto value) { return present ? std::to_string(value) : std::string(); };
  return {d.run_key(),
          std::string(to_string(d.model)),
          std::string(to_string(d.space)),
          std::to_string(d.dims),
          std::to_string(d.n),
          to_string(d.alpha),
          num(d.target_mean_degree),
          num(d.p_rewire),
          d.degree_family ? std::string(to_string(*d.degree_family)) : std::string(),
          std::to_string(d.space_rep),
          std::to_string(d.graph_rep),
          std::to_string(d.space_seed),
          std::to_string(d.graph_seed),
          r.ok ? "ok" : "failed",
          r.error,
          r.ok ? num(r.b) : "",
          r.ok ? num(r.expected_mean_degree) : "",
          r.ok ? (r.calibration_converged ? "1" : "0") : "",
          opt(r.ok && sdc, r.sequence_sum),
          opt(r.ok && sdc, r.multigraph_degree_sum),
          r.ok && sdc ? (r.degrees_match ? "1" : "0") : "",
          opt(r.ok && sdc, r.multigraph_edges),
          opt(r.ok && sdc, r.loops_removed),
          opt(r.ok && sdc, r.parallel_removed),
          opt(r.ok, r.rewiring.rewired),
          opt(r.ok, r.rewiring.skipped),
          opt(r.ok, m.n_nodes),
          opt(r.ok, m.n_edges),
          r.ok ? num(m.mean_degree) : "",
          r.ok ? csv_cell(m.clustering) : "",
          r.ok ? csv_cell(m.assortativity) : "",
          r.ok ? csv_cell(m.avg_path_length) : "",
          r.ok ? csv_cell(m.gini) : "",
          r.ok ? num(m.lcc_fraction) : "",
          num(r.wall_seconds)};
}

struct SweepOptions {
  bool resume = false;
  /// 0: SDNET_WORKERS or hardware concurrency.
  std::size_t workers = 0;
  std::string results_file = "results.csv";
};

struct SweepSummary {
  std::size_t total = 0;
  std::size_t executed = 0;
  std::size_t skipped = 0;
  std::size_t failed = 0;
  std::filesystem::path results_path;
};

/// Runs every grid point not already present (by run_key) in the results
/// file. Rows are appended and flushed in grid order whatever order workers
/// finish in, so two executions of one config give identical files apart
/// from the wall-time column.
inline SweepSummary run_sweep(const ExperimentConfig& cfg, const SweepOptions& options = {}) {
  const std::vector<RunDescriptor> runs = expand_grid(cfg);
  namespace fs = std::filesystem;
  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw IoError("sweep: cannot create output directory '" + cfg.output_dir + "'");

  SweepSummary summary;
  summary.total = runs.size();
  summary.results_path = dir / options.results_file;

  std::unordered_set<std::string> done;
  const bool append = options.resume && fs::exists(summary.results_path);
  if (append) {
    std::ifstream in(summary.results_path);
    const csv::Table existing = csv::read(in);
    if (!existing.header.empty() && existing.header != results_header())
      throw IoError("sweep: existing results file has a different header");
    const std::size_t key_col = 0;
    for (const auto& row : existing.rows) done.insert(row[key_col]);
  }
  std::ofstream out(summary.results_path, append ? std::ios::app : std::ios::trunc);
  if (!out) throw IoError("sweep: cannot write '" + summary.results_path.string() + "'");
  if (!append || fs::file_size(summary.results_path) == 0)
    out << csv::join(results_header()) << '\n' << std::flush;
  {
    std::ofstream cfg_out(dir / "config.json");
    cfg_out << to_json(cfg).dump(2) << '\n';
  }

  std::vector<const RunDescriptor*> pending;
  for (const auto& d : runs)
    if (!done.contains(d.run_key())) pending.push_back(&d);
  summary.skipped = runs.size() - pending.size();
  summary.executed = pending.size();

  auto emit = [&](const RunRecord& rec) {
    if (!rec.ok) ++summary.failed;
    out << csv::join(to_csv_fields(rec)) << '\n' << std::flush;
  };

  std::size_t workers = options.workers ? options.workers : configured_workers();
  workers = std::min(workers, pending.size());
  if (workers <= 1) {
    for (const RunDescriptor* d : pending) emit(run_one(*d));
    return summary;
  }

  std::vector<std::optional<RunRecord>> slots(pending.size());
  std::mutex mu;
  std::condition_variable ready;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    ScopedThreadLimit single(1);
    for (std::size_t k = next++; k < pending.size(); k = next++) {
      RunRecord rec = run_one(*pending[k]);
      {
        std::lock_guard lock(mu);
        slots[k] = std::move(rec);
      }
      ready.notify_all();
    }
  };
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (std::size_t k = 0; k < pending.size(); ++k) {
    std::unique_lock lock(mu);
    ready.wait(lock, [&] { return slots[k].has_value(); });
    RunRecord rec = std::move(*slots[k]);
    slots[k].reset();
    lock.unlock();
    emit(rec);
  }
  return summary;
}

inline const std::vector<std::string>& summarized_metrics() {
  static const std::vector<std::string> metrics{"mean_degree",     "clustering", "assortativity",
                                                "avg_path_length", "gini",       "lcc_fraction"};
  return metrics;
}

/// Groups successful rows by the given columns. Per group: run count, and
/// for every metric the mean plus bootstrap min/max of replicate means. When
/// `n` is a group key, small_world_r is the correlation of mean L with ln N
/// across the groups that differ only in N (empty with fewer than 3 sizes).
inline csv::Table summarize(const csv::Table& results, const std::vector<std::string>& group_keys,
                            std::size_t n_boot = 100, std::uint64_t seed = 0) {
  detail::require(!results.rows.empty(), "summarize: empty results table");
  std::vector<std::size_t> key_cols;
  for (const auto& key : group_keys) {
    const std::size_t col = results.column(key);
    if (col == std::string::npos) throw InvalidArgument("summarize: unknown group key '" + key + "'");
    key_cols.push_back(col);
  }
  const std::size_t status_col = results.column("status");
  std::vector<std::size_t> metric_cols;
  for (const auto& m : summarized_metrics()) {
    const std::size_t col = results.column(m);
    if (col == std::string::npos) throw InvalidArgument("summarize: results lack column '" + m + "'");
    metric_cols.push_back(col);
  }

  std::vector<std::vector<std::string>> group_values;
  std::map<std::vector<std::string>, std::vector<std::size_t>> members;
  for (std::size_t r = 0; r < results.rows.size(); ++r) {
    const auto& row = results.rows[r];
    if (status_col != std::string::npos && row[status_col] != "ok") continue;
    std::vector<std::string> key;
    for (std::size_t c : key_cols) key.push_back(row[c]);
    auto [it, inserted] = members.try_emplace(key);
    if (inserted) group_values.push_back(key);
    it->second.push_back(r);
  }
  detail::require(!group_values.empty(), "summarize: no successful runs");

  csv::Table out;
  out.header = group_keys;
  out.header.push_back("runs");
  for (const auto& m : summarized_metrics()) {
    out.header.push_back(m + "_mean");
    out.header.push_back(m + "_lo");
    out.header.push_back(m + "_hi");
  }
  out.header.push_back("small_world_r");

  std::vector<std::optional<double>> mean_path(group_values.size());
  for (std::size_t g = 0; g < group_values.size(); ++g) {
    const auto& key = group_values[g];
    const auto& rows = members.at(key);
    std::vector<std::string> line = key;
    line.push_back(std::to_string(rows.size()));
    std::string key_text;
    for (const auto& k : key) key_text += k + ';';
    for (std::size_t mi = 0; mi < metric_cols.size(); ++mi) {
      std::vector<double> values;
      for (std::size_t r : rows) {
        const std::string& cell = results.rows[r][metric_cols[mi]];
        if (!cell.empty()) values.push_back(std::stod(cell));
      }
      if (values.empty()) {
        line.insert(line.end(), {"", "", ""});
        continue;
      }
      double mean = 0.0;
      for (double v : values) mean += v;
      mean /= static_cast<double>(values.size());
      const auto bounds =
          bootstrap_bounds(values, n_boot, derive_seed(seed, key_text + summarized_metrics()[mi]));
      line.push_back(format_double(mean));
      line.push_back(format_double(bounds.min_mean));
      line.push_back(format_double(bounds.max_mean));
      if (summarized_metrics()[mi] == "avg_path_length") mean_path[g] = mean;
    }
    out.rows.push_back(std::move(line));
  }

  const auto n_pos = std::find(group_keys.begin(), group_keys.end(), "n");
  std::vector<std::string> fits(group_values.size());
  if (n_pos != group_keys.end()) {
    const auto n_idx = static_cast<std::size_t>(n_pos - group_keys.begin());
    std::map<std::vector<std::string>, std::vector<std::size_t>> families;
    for (std::size_t g = 0; g < group_values.size(); ++g) {
      auto key = group_values[g];
      key.erase(key.begin() + static_cast<std::ptrdiff_t>(n_idx));
      families[key].push_back(g);
    }
    for (const auto& [_, gs] : families) {
      std::vector<SizePathPoint> points;
      for (std::size_t g : gs)
        if (mean_path[g]) points.push_back({std::stod(group_values[g][n_idx]), *mean_path[g]});
      std::string r;
      if (points.size() >= 3) {
        try {
          r = format_double(small_world_fit(points));
        } catch (const InvalidArgument&) {
        }
      }
      for (std::size_t g : gs) fits[g] = r;
    }
  }
  for (std::size_t g = 0; g < out.rows.size(); ++g) out.rows[g].push_back(fits[g]);
  return out;
}

}  // namespace sdnet
