#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sdnet/error.hpp"
#include "sdnet/graph.hpp"
#include "sdnet/parallel.hpp"
#include "sdnet/rng.hpp"
#include "sdnet/sda.hpp"

namespace sdnet {

/// Transitivity: 3 * triangles / connected triples. nullopt when the graph
/// has no connected triple.
inline std::optional<double> global_clustering(const Graph& g) {
  std::uint64_t triangles = 0;
  std::uint64_t triples = 0;
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    const auto nu = g.neighbors(u);
    const std::uint64_t d = nu.size();
    triples += d * (d - 1) / 2;
    for (NodeId v : nu) {
      if (v <= u) continue;
      // Common neighbours w > v, by merging two sorted lists.
      const auto nv = g.neighbors(v);
      auto a = std::upper_bound(nu.begin(), nu.end(), v);
      auto b = std::upper_bound(nv.begin(), nv.end(), v);
      while (a != nu.end() && b != nv.end()) {
        if (*a < *b) {
          ++a;
        } else if (*b < *a) {
          ++b;
        } else {
          ++triangles;
          ++a;
          ++b;
        }
      }
    }
  }
  if (triples == 0) return std::nullopt;
  return 3.0 * static_cast<double>(triangles) / static_cast<double>(triples);
}

/// Pearson correlation of endpoint degrees with every edge taken in both
/// orientations. Sums are kept in exact integer arithmetic; nullopt when the
/// endpoint degrees have zero variance or there are no edges.
inline std::optional<double> degree_assortativity(const Graph& g) {
  using Wide = __int128;
  Wide s1 = 0;   // sum over oriented pairs of x
  Wide s2 = 0;   // sum of x^2
  Wide sxy = 0;  // sum of x*y
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    const Wide du = static_cast<Wide>(g.degree(u));
    for (NodeId v : g.neighbors(u)) {
      if (v <= u) continue;
      const Wide dv = static_cast<Wide>(g.degree(v));
      s1 += du + dv;
      s2 += du * du + dv * dv;
      sxy += 2 * du * dv;
    }
  }
  const Wide count = 2 * static_cast<Wide>(g.num_edges());
  if (count == 0) return std::nullopt;
  const Wide cov = count * sxy - s1 * s1;
  const Wide var = count * s2 - s1 * s1;
  if (var == 0) return std::nullopt;
  return static_cast<double>(static_cast<long double>(cov) / static_cast<long double>(var));
}

/// Nodes of the largest connected component, ascending. Ties go to the
/// component containing the smallest node id.
inline std::vector<NodeId> largest_component(const Graph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<std::uint32_t> label(n, std::numeric_limits<std::uint32_t>::max());
  std::vector<NodeId> queue;
  std::vector<std::size_t> sizes;
  for (NodeId s = 0; s < n; ++s) {
    if (label[s] != std::numeric_limits<std::uint32_t>::max()) continue;
    const auto id = static_cast<std::uint32_t>(sizes.size());
    queue.assign(1, s);
    label[s] = id;
    for (std::size_t head = 0; head < queue.size(); ++head)
      for (NodeId w : g.neighbors(queue[head]))
        if (label[w] == std::numeric_limits<std::uint32_t>::max()) {
          label[w] = id;
          queue.push_back(w);
        }
    sizes.push_back(queue.size());
  }
  std::vector<NodeId> out;
  if (sizes.empty()) return out;
  const auto best = static_cast<std::uint32_t>(
      std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  out.reserve(sizes[best]);
  for (NodeId v = 0; v < n; ++v)
    if (label[v] == best) out.push_back(v);
  return out;
}

/// Number of BFS sources for average_path_length. Zero means every node of
/// the largest component (exact).
struct PathSampling {
  std::size_t sources = 0;
  std::uint64_t seed = 0;

  static PathSampling exact() { return {}; }
  static PathSampling sampled(std::size_t s, std::uint64_t seed) {
    detail::require(s >= 1, "PathSampling: need at least one source");
    return {s, seed};
  }
};

inline constexpr std::size_t kSampledPathThreshold = 4000;
inline constexpr std::size_t kDefaultPathSources = 512;

/// Exact below 4000 nodes, 512 sampled sources at or above.
inline PathSampling default_path_sampling(std::size_t n_nodes, std::uint64_t seed) {
  return n_nodes >= kSampledPathThreshold ? PathSampling::sampled(kDefaultPathSources, seed)
                                          : PathSampling::exact();
}

/// Mean shortest-path length over reachable pairs inside the largest
/// component. Sampled mode averages BFS distances from s distinct sources
/// drawn uniformly from that component; s >= component size is exact.
inline std::optional<double> average_path_length(const Graph& g,
                                                 PathSampling mode = PathSampling::exact()) {
  std::vector<NodeId> lcc = largest_component(g);
  if (lcc.size() < 2) return std::nullopt;
  std::vector<NodeId> sources = lcc;
  if (mode.sources > 0 && mode.sources < lcc.size()) {
    Rng rng(mode.seed);
    for (std::size_t k = 0; k < mode.sources; ++k)
      std::swap(sources[k], sources[k + uniform_index(rng, sources.size() - k)]);
    sources.resize(mode.sources);
  }

  const std::size_t n = g.num_nodes();
  constexpr std::size_t kSourceBlock = 16;
  const std::uint64_t total = ordered_block_sum<std::uint64_t>(
      sources.size(), kSourceBlock, [&](std::size_t begin, std::size_t end) {
        std::vector<std::uint32_t> dist(n);
        std::vector<NodeId> queue;
        queue.reserve(n);
        std::uint64_t acc = 0;
        for (std::size_t k = begin; k < end; ++k) {
          std::fill(dist.begin(), dist.end(), std::numeric_limits<std::uint32_t>::max());
          queue.assign(1, sources[k]);
          dist[sources[k]] = 0;
          for (std::size_t head = 0; head < queue.size(); ++head) {
            const NodeId x = queue[head];
            for (NodeId y : g.neighbors(x))
              if (dist[y] == std::numeric_limits<std::uint32_t>::max()) {
                dist[y] = dist[x] + 1;
                acc += dist[y];
                queue.push_back(y);
              }
          }
        }
        return acc;
      });
  const double pairs = static_cast<double>(sources.size()) * static_cast<double>(lcc.size() - 1);
  return static_cast<double>(total) / pairs;
}

/// Gini coefficient sum_i sum_j |k_i - k_j| / (2 N^2 mean), computed from
/// the sorted sequence in integer arithmetic. nullopt for empty or all-zero
/// input.
inline std::optional<double> gini_coefficient(std::span<const std::size_t> degrees) {
  if (degrees.empty()) return std::nullopt;
  std::vector<std::size_t> sorted(degrees.begin(), degrees.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<long long>(sorted.size());
  __int128 half_sum = 0;  // sum over i < j of |k_i - k_j|
  __int128 total = 0;
  for (long long i = 0; i < n; ++i) {
    const auto k = static_cast<__int128>(sorted[static_cast<std::size_t>(i)]);
    half_sum += (2 * i - n + 1) * k;
    total += k;
  }
  if (total == 0) return std::nullopt;
  return static_cast<double>(static_cast<long double>(half_sum) /
                             (static_cast<long double>(n) * static_cast<long double>(total)));
}

/// Pearson correlation; nullopt on size mismatch, fewer than 2 points or
/// zero variance.
inline std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

struct SizePathPoint {
  double n_nodes = 0.0;
  double path_length = 0.0;
};

/// Pearson correlation between L and ln N.
inline double small_world_fit(std::span<const SizePathPoint> points) {
  detail::require(points.size() >= 3, "small_world_fit: need at least 3 points");
  std::vector<double> log_n;
  std::vector<double> path;
  for (const auto& p : points) {
    detail::require(p.n_nodes > 0.0, "small_world_fit: N must be positive");
    log_n.push_back(std::log(p.n_nodes));
    path.push_back(p.path_length);
  }
  std::vector<double> distinct = log_n;
  std::sort(distinct.begin(), distinct.end());
  detail::require(std::adjacent_find(distinct.begin(), distinct.end()) == distinct.end(),
                  "small_world_fit: N values must be distinct");
  const auto r = pearson(log_n, path);
  detail::require(r.has_value(), "small_world_fit: zero variance in L");
  return *r;
}

struct BootstrapBounds {
  double min_mean = 0.0;
  double max_mean = 0.0;
};

/// Min and max of replicate means over n_boot resamples with replacement.
inline BootstrapBounds bootstrap_bounds(std::span<const double> values, std::size_t n_boot,
                                        std::uint64_t seed) {
  detail::require(!values.empty(), "bootstrap_bounds: empty input");
  detail::require(n_boot >= 1, "bootstrap_bounds: n_boot must be >= 1");
  Rng rng(seed);
  BootstrapBounds out{std::numeric_limits<double>::infinity(),
                      -std::numeric_limits<double>::infinity()};
  for (std::size_t r = 0; r < n_boot; ++r) {
    double acc = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) acc += values[uniform_index(rng, values.size())];
    const double mean = acc / static_cast<double>(values.size());
    out.min_mean = std::min(out.min_mean, mean);
    out.max_mean = std::max(out.max_mean, mean);
  }
  return out;
}

struct MetricsReport {
  std::size_t n_nodes = 0;
  std::size_t n_edges = 0;
  double mean_degree = 0.0;
  std::optional<double> clustering;
  std::optional<double> assortativity;
  std::optional<double> avg_path_length;
  std::optional<double> gini;
  double lcc_fraction = 0.0;
};

inline MetricsReport compute_metrics(const Graph& g, PathSampling paths) {
  MetricsReport r;
  r.n_nodes = g.num_nodes();
  r.n_edges = g.num_edges();
  if (r.n_nodes == 0) return r;
  r.mean_degree = 2.0 * static_cast<double>(r.n_edges) / static_cast<double>(r.n_nodes);
  r.clustering = global_clustering(g);
  r.assortativity = degree_assortativity(g);
  r.avg_path_length = average_path_length(g, paths);
  const auto degrees = g.degrees();
  r.gini = gini_coefficient(degrees);
  r.lcc_fraction = static_cast<double>(largest_component(g).size()) / static_cast<double>(r.n_nodes);
  return r;
}

inline MetricsReport compute_metrics(const Graph& g) {
  return compute_metrics(g, default_path_sampling(g.num_nodes(), 0));
}

inline constexpr const char* kMetricsCsvHeader =
    "n_nodes,n_edges,mean_degree,clustering,assortativity,avg_path_length,gini,lcc_fraction";

/// Full-precision number, or an empty cell for undefined values.
inline std::string csv_cell(const std::optional<double>& value) {
  return value ? format_double(*value) : std::string();
}

inline std::string to_csv_row(const MetricsReport& r) {
  return std::to_string(r.n_nodes) + ',' + std::to_string(r.n_edges) + ',' +
         format_double(r.mean_degree) + ',' + csv_cell(r.clustering) + ',' +
         csv_cell(r.assortativity) + ',' + csv_cell(r.avg_path_length) + ',' + csv_cell(r.gini) +
         ',' + format_double(r.lcc_fraction);
}

}  // namespace sdnet
