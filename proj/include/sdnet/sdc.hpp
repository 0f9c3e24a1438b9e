#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "sdnet/error.hpp"
#include "sdnet/graph.hpp"
#include "sdnet/rng.hpp"
#include "sdnet/sda.hpp"

namespace sdnet {

enum class DegreeFamily { Poisson, NegativeBinomial, PowerLaw, UserProvided };

inline std::string_view to_string(DegreeFamily family) {
  switch (family) {
    case DegreeFamily::Poisson: return "poisson";
    case DegreeFamily::NegativeBinomial: return "negbinom";
    case DegreeFamily::PowerLaw: return "powerlaw";
    case DegreeFamily::UserProvided: return "user";
  }
  throw InvalidArgument("unknown degree family");
}

inline DegreeFamily parse_degree_family(std::string_view name) {
  if (name == "poisson") return DegreeFamily::Poisson;
  if (name == "negbinom" || name == "negative_binomial" || name == "nb")
    return DegreeFamily::NegativeBinomial;
  if (name == "powerlaw" || name == "power_law" || name == "pl") return DegreeFamily::PowerLaw;
  if (name == "user") return DegreeFamily::UserProvided;
  throw InvalidArgument("unknown degree family '" + std::string(name) + "'");
}

struct DegreeSequence {
  std::vector<std::size_t> degrees;
  DegreeFamily family = DegreeFamily::UserProvided;
  double target_mean = 0.0;

  std::size_t size() const noexcept { return degrees.size(); }
  std::uint64_t sum() const noexcept {
    return std::accumulate(degrees.begin(), degrees.end(), std::uint64_t{0});
  }
  double mean() const noexcept {
    return degrees.empty() ? 0.0 : static_cast<double>(sum()) / static_cast<double>(size());
  }
};

// Negative binomial with size 1 and success probability 1/31: a geometric
// count of failures with mean 30.
inline constexpr int kNegBinomialSize = 1;
inline constexpr double kNegBinomialProb = 1.0 / 31.0;
inline constexpr double kDefaultMalformed = 1e-9;

namespace detail {

// Odd sums are fixed by moving one uniformly chosen node by one: up, unless
// that node already sits at the cap, in which case down.
inline void fix_parity(std::vector<std::size_t>& degrees, std::size_t cap, Rng& rng) {
  const std::uint64_t total = std::accumulate(degrees.begin(), degrees.end(), std::uint64_t{0});
  if (total % 2 == 0 || degrees.empty()) return;
  std::size_t& k = degrees[uniform_index(rng, degrees.size())];
  if (k < cap)
    ++k;
  else
    --k;
}

}  // namespace detail

inline DegreeSequence poisson_sequence(std::size_t n, double mean, std::uint64_t seed) {
  detail::require(mean > 0.0, "poisson_sequence: mean must be > 0");
  detail::require(n >= 1, "poisson_sequence: n must be >= 1");
  Rng rng(seed);
  std::poisson_distribution<long long> dist(mean);
  DegreeSequence seq{std::vector<std::size_t>(n), DegreeFamily::Poisson, mean};
  for (auto& k : seq.degrees) k = static_cast<std::size_t>(dist(rng));
  detail::fix_parity(seq.degrees, std::numeric_limits<std::size_t>::max(), rng);
  return seq;
}

inline DegreeSequence negative_binomial_sequence(std::size_t n, std::uint64_t seed) {
  detail::require(n >= 1, "negative_binomial_sequence: n must be >= 1");
  Rng rng(seed);
  std::negative_binomial_distribution<long long> dist(kNegBinomialSize, kNegBinomialProb);
  const double mean = kNegBinomialSize * (1.0 - kNegBinomialProb) / kNegBinomialProb;
  DegreeSequence seq{std::vector<std::size_t>(n), DegreeFamily::NegativeBinomial, mean};
  for (auto& k : seq.degrees) k = static_cast<std::size_t>(dist(rng));
  detail::fix_parity(seq.degrees, std::numeric_limits<std::size_t>::max(), rng);
  return seq;
}

/// Edges per arriving node in the preferential attachment generator.
inline std::size_t attachment_edges(double target_mean) {
  return static_cast<std::size_t>(std::lround(target_mean / 2.0));
}

/// Degree sequence with a heavy right tail. Grows a preferential attachment
/// graph from a clique on m+1 nodes, each new node linking to m distinct
/// existing nodes chosen proportionally to degree (m = round(mean/2)); then
/// adds uniform integer noise on [-m, m], clamps to [0, N-1] and fixes parity.
inline DegreeSequence power_law_sequence(std::size_t n, double target_mean, std::uint64_t seed) {
  detail::require(target_mean >= 2.0, "power_law_sequence: target mean must be >= 2");
  const std::size_t m = attachment_edges(target_mean);
  detail::require(m >= 1, "power_law_sequence: need at least one edge per arriving node");
  detail::require(n > m, "power_law_sequence: n must exceed the edges per arriving node");
  Rng rng(seed);

  std::vector<std::size_t> degree(n, 0);
  // Node id repeated once per incident edge end; a uniform pick from it is
  // a degree-proportional pick.
  std::vector<NodeId> ends;
  ends.reserve(2 * n * m + (m + 1) * m);
  for (std::size_t i = 0; i <= m; ++i)
    for (std::size_t j = i + 1; j <= m; ++j) {
      ends.push_back(static_cast<NodeId>(i));
      ends.push_back(static_cast<NodeId>(j));
      ++degree[i];
      ++degree[j];
    }
  std::vector<NodeId> targets;
  targets.reserve(m);
  for (std::size_t v = m + 1; v < n; ++v) {
    targets.clear();
    while (targets.size() < m) {
      const NodeId t = ends[uniform_index(rng, ends.size())];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    for (NodeId t : targets) {
      ends.push_back(t);
      ends.push_back(static_cast<NodeId>(v));
      ++degree[t];
      ++degree[v];
    }
  }

  const long long noise_span = static_cast<long long>(m);
  std::uniform_int_distribution<long long> noise(-noise_span, noise_span);
  const long long cap = static_cast<long long>(n - 1);
  DegreeSequence seq{std::vector<std::size_t>(n), DegreeFamily::PowerLaw, target_mean};
  for (std::size_t i = 0; i < n; ++i) {
    const long long k = static_cast<long long>(degree[i]) + noise(rng);
    seq.degrees[i] = static_cast<std::size_t>(std::clamp(k, 0LL, cap));
  }
  detail::fix_parity(seq.degrees, n - 1, rng);
  return seq;
}

inline DegreeSequence generate_degree_sequence(DegreeFamily family, std::size_t n, double mean,
                                               std::uint64_t seed) {
  switch (family) {
    case DegreeFamily::Poisson: return poisson_sequence(n, mean, seed);
    case DegreeFamily::NegativeBinomial: return negative_binomial_sequence(n, seed);
    case DegreeFamily::PowerLaw: return power_law_sequence(n, mean, seed);
    case DegreeFamily::UserProvided: break;
  }
  throw InvalidArgument("generate_degree_sequence: user-provided sequences cannot be generated");
}

inline void write_degree_sequence(std::ostream& out, const DegreeSequence& seq) {
  for (std::size_t k : seq.degrees) out << k << '\n';
}

inline DegreeSequence read_degree_sequence(std::istream& in) {
  DegreeSequence seq;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    long long k = -1;
    try {
      k = std::stoll(line);
    } catch (const std::exception&) {
      throw IoError("degree sequence: cannot parse '" + line + "'");
    }
    if (k < 0) throw IoError("degree sequence: negative degree");
    seq.degrees.push_back(static_cast<std::size_t>(k));
  }
  seq.family = DegreeFamily::UserProvided;
  seq.target_mean = seq.mean();
  return seq;
}

struct SDCParams {
  double p_malformed = kDefaultMalformed;
  std::uint64_t seed = 0;
};

/// Distance-weighted stub matching. Works on a private copy of the
/// probability matrix:
///   - zero entries (including the diagonal) are raised to p_malformed;
///   - rows and columns of nodes without free stubs are zeroed, both
///     initially and the moment a node's last stub is used;
///   - each step picks i proportionally to its row sum, then j within the
///     row proportionally to p_ij, links them and sets p_ij = p_malformed.
/// Row sums are maintained incrementally; the row of each picked i is summed
/// exactly before the second draw, which also refreshes its cached sum.
/// Realized degrees (loops counted twice) equal the input exactly.
inline MultiGraph sdc_sample(const ProbabilityMatrix& probs, const DegreeSequence& seq,
                             const SDCParams& params) {
  const std::size_t n = probs.size();
  detail::require(seq.size() == n, "sdc_sample: degree sequence length must equal N");
  detail::require(seq.sum() % 2 == 0, "sdc_sample: degree sum must be even");
  detail::require(params.p_malformed > 0.0 && params.p_malformed < 1.0,
                  "sdc_sample: p_malformed must lie in (0,1)");

  std::vector<double> w(probs.values().begin(), probs.values().end());
  for (double& p : w)
    if (p == 0.0) p = params.p_malformed;
  std::vector<std::size_t> stubs = seq.degrees;

  auto kill = [&](std::size_t v) {
    for (std::size_t j = 0; j < n; ++j) {
      w[v * n + j] = 0.0;
      w[j * n + v] = 0.0;
    }
  };
  for (std::size_t v = 0; v < n; ++v)
    if (stubs[v] == 0) kill(v);

  std::vector<double> row_sum(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) row_sum[i] += w[i * n + j];

  // Killing v removes w[j][v] from every other row.
  auto kill_tracked = [&](std::size_t v) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j != v) row_sum[j] -= w[j * n + v];
      w[v * n + j] = 0.0;
      w[j * n + v] = 0.0;
    }
    row_sum[v] = 0.0;
  };
  auto set_weight = [&](std::size_t i, std::size_t j, double value) {
    row_sum[i] += value - w[i * n + j];
    w[i * n + j] = value;
    if (i != j) {
      row_sum[j] += value - w[j * n + i];
      w[j * n + i] = value;
    }
  };
  auto exact_row_sum = [&](std::size_t i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += w[i * n + j];
    return s;
  };

  Rng rng(params.seed);
  MultiGraph out(n);
  std::uint64_t remaining = seq.sum();
  while (remaining > 0) {
    double total = 0.0;
    for (std::size_t v = 0; v < n; ++v)
      if (stubs[v] > 0 && row_sum[v] > 0.0) total += row_sum[v];
    if (!(total > 0.0)) {
      // Incremental sums drifted to nothing; rebuild them exactly.
      for (std::size_t v = 0; v < n; ++v) row_sum[v] = stubs[v] > 0 ? exact_row_sum(v) : 0.0;
      total = 0.0;
      for (std::size_t v = 0; v < n; ++v) total += std::max(0.0, row_sum[v]);
      if (!(total > 0.0)) throw Error("sdc_sample: no live weight left with stubs remaining");
    }

    std::size_t i = n;
    const double target_i = uniform01(rng) * total;
    double acc = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      if (stubs[v] == 0 || !(row_sum[v] > 0.0)) continue;
      i = v;
      acc += row_sum[v];
      if (target_i < acc) break;
    }
    --stubs[i];

    // Second draw over row i. A node whose last stub was just taken cannot
    // be its own partner.
    row_sum[i] = exact_row_sum(i);
    double row_total = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (stubs[j] > 0) row_total += w[i * n + j];
    std::size_t j_pick = n;
    const double target_j = uniform01(rng) * row_total;
    acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double wj = w[i * n + j];
      if (stubs[j] == 0 || !(wj > 0.0)) continue;
      j_pick = j;
      acc += wj;
      if (target_j < acc) break;
    }
    if (j_pick == n) throw Error("sdc_sample: selected node has no available partner");
    --stubs[j_pick];

    out.add_edge(static_cast<NodeId>(i), static_cast<NodeId>(j_pick));
    set_weight(i, j_pick, params.p_malformed);
    if (stubs[i] == 0) kill_tracked(i);
    if (j_pick != i && stubs[j_pick] == 0) kill_tracked(j_pick);
    remaining -= 2;
  }
  return out;
}

struct SimplifyResult {
  Graph graph;
  std::size_t loops_removed = 0;
  std::size_t parallel_removed = 0;
};

/// Drops self-loops and collapses parallel edges.
inline SimplifyResult simplify(const MultiGraph& mg) {
  std::vector<Edge> edges(mg.edges().begin(), mg.edges().end());
  std::sort(edges.begin(), edges.end());
  SimplifyResult result;
  std::vector<Edge> kept;
  kept.reserve(edges.size());
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (edges[k].u == edges[k].v) {
      ++result.loops_removed;
    } else if (!kept.empty() && kept.back() == edges[k]) {
      ++result.parallel_removed;
    } else {
      kept.push_back(edges[k]);
    }
  }
  result.graph = Graph::from_edges(mg.num_nodes(), kept);
  return result;
}

}  // namespace sdnet
