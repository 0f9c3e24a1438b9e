#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sdnet/error.hpp"
#include "sdnet/graph.hpp"
#include "sdnet/parallel.hpp"
#include "sdnet/rng.hpp"
#include "sdnet/social_space.hpp"

namespace sdnet {

/// Homophily strength. Positive and finite, or infinite for the hard
/// random geometric graph limit.
class Alpha {
 public:
  explicit Alpha(double value) : value_(value) {
    if (!(value > 0.0)) throw InvalidArgument("alpha must be > 0 or infinite");
  }
  static Alpha infinite() { return Alpha(std::numeric_limits<double>::infinity()); }

  bool is_infinite() const noexcept { return std::isinf(value_); }
  double value() const noexcept { return value_; }

  friend bool operator==(const Alpha&, const Alpha&) = default;

 private:
  double value_;
};

/// Shortest round-trip decimal form of a double.
inline std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

inline std::string to_string(Alpha alpha) {
  return alpha.is_infinite() ? std::string("inf") : format_double(alpha.value());
}

inline Alpha parse_alpha(std::string_view text) {
  if (text == "inf" || text == "Inf" || text == "infinity" || text == "Infinity")
    return Alpha::infinite();
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw InvalidArgument("cannot parse alpha '" + std::string(text) + "'");
  return Alpha(value);
}

namespace detail {

// Connection probability from log(d) - log(b). Evaluating (d/b)^alpha as
// exp(alpha * log(d/b)) keeps large alpha from overflowing; exp(+inf) gives
// p = 0 and log(0) = -inf gives p = 1.
inline double sda_from_log_ratio(double log_ratio, Alpha alpha) noexcept {
  if (alpha.is_infinite()) {
    if (log_ratio < 0.0) return 1.0;
    if (log_ratio > 0.0) return 0.0;
    return 0.5;
  }
  const double t = alpha.value() * log_ratio;
  const double p = 1.0 / (1.0 + std::exp(t));
  return std::clamp(p, 0.0, 1.0);
}

inline constexpr std::size_t kRowBlock = 64;

// Offset of pair (i, i+1) in the row-major upper triangle.
constexpr std::size_t upper_row_offset(std::size_t n, std::size_t i) noexcept {
  return i * (2 * n - i - 1) / 2;
}

}  // namespace detail

/// 1 / (1 + (d/b)^alpha); for infinite alpha a step at b with p = 1/2 at d = b.
inline double sda_probability(double d, Alpha alpha, double b) {
  detail::require(d >= 0.0, "sda_probability: distance must be >= 0");
  detail::require(b > 0.0, "sda_probability: b must be > 0");
  return detail::sda_from_log_ratio(std::log(d) - std::log(b), alpha);
}

/// 1 / (1 + exp(alpha (d - b))).
inline double fermi_dirac_probability(double d, double alpha, double b) {
  detail::require(d >= 0.0, "fermi_dirac_probability: distance must be >= 0");
  detail::require(alpha > 0.0 && std::isfinite(alpha),
                  "fermi_dirac_probability: alpha must be finite and > 0");
  return 1.0 / (1.0 + std::exp(alpha * (d - b)));
}

/// (1/N) * sum over i != j of p_ij. Rows are summed in fixed blocks and
/// combined in order, so the value does not depend on the thread count.
inline double expected_mean_degree(const DistanceProvider& provider, Alpha alpha, double b) {
  detail::require(b > 0.0, "expected_mean_degree: b must be > 0");
  const std::size_t n = provider.size();
  const double log_b = std::log(b);
  const double upper = ordered_block_sum<double>(n, detail::kRowBlock, [&](std::size_t begin,
                                                                           std::size_t end) {
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        acc += detail::sda_from_log_ratio(std::log(provider(i, j)) - log_b, alpha);
    return acc;
  });
  return 2.0 * upper / static_cast<double>(n);
}

/// Tolerance on |E[k] - target| accepted by calibrate_b.
inline double calibration_tolerance(double target_mean_degree) {
  return std::max(0.01, 1e-4 * target_mean_degree);
}

struct Calibration {
  double b = 0.0;
  double mean_degree = 0.0;  ///< expected_mean_degree at b
  int expansions = 0;
  int iterations = 0;
  /// False only when E[k] is a step function of b (infinite alpha) with no
  /// step inside the tolerance band; b is then the closest point found.
  bool converged = false;
};

inline constexpr int kMaxBracketExpansions = 64;
inline constexpr int kMaxBisectionIterations = 200;
inline constexpr std::size_t kMedianSampleCap = std::size_t{1} << 20;

namespace detail {

// Median of off-diagonal distances over the upper triangle; strided when the
// pair count exceeds the sample cap. Falls back to the smallest positive
// distance seen if the median is zero.
inline double bracket_start(const DistanceProvider& provider) {
  const std::size_t n = provider.size();
  const std::size_t pairs = n * (n - 1) / 2;
  const std::size_t stride = std::max<std::size_t>(1, (pairs + kMedianSampleCap - 1) / kMedianSampleCap);
  std::vector<double> sample;
  sample.reserve(pairs / stride + 1);
  std::size_t counter = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j, ++counter)
      if (counter % stride == 0) sample.push_back(provider(i, j));
  auto mid = sample.begin() + static_cast<std::ptrdiff_t>(sample.size() / 2);
  std::nth_element(sample.begin(), mid, sample.end());
  if (*mid > 0.0) return *mid;
  double smallest = std::numeric_limits<double>::infinity();
  for (double d : sample)
    if (d > 0.0) smallest = std::min(smallest, d);
  if (std::isfinite(smallest)) return smallest;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (provider(i, j) > 0.0) smallest = std::min(smallest, provider(i, j));
  if (!std::isfinite(smallest))
    throw CalibrationError("calibrate_b: all pairwise distances are zero");
  return smallest;
}

}  // namespace detail

/// Finds b with |expected_mean_degree(b) - target| <= calibration_tolerance.
/// The bracket grows geometrically (factor 2) from the median distance until
/// the sign of E[k](b) - target changes, then plain bisection narrows it.
inline Calibration calibrate_b(const DistanceProvider& provider, Alpha alpha,
                               double target_mean_degree,
                               std::uint64_t memory_cap = kDefaultMemoryCap) {
  const std::size_t n = provider.size();
  detail::require(target_mean_degree > 0.0 && target_mean_degree < static_cast<double>(n - 1),
                  "calibrate_b: target mean degree must lie in (0, N-1)");
  const double tol = calibration_tolerance(target_mean_degree);

  // Log distances of the upper triangle, cached when they fit under the cap.
  // Summation order matches expected_mean_degree exactly.
  const std::size_t pairs = n * (n - 1) / 2;
  std::vector<double> log_d;
  if (static_cast<std::uint64_t>(pairs) * sizeof(double) <= memory_cap) {
    log_d.resize(pairs);
    parallel_blocks((n + detail::kRowBlock - 1) / detail::kRowBlock, [&](std::size_t blk) {
      const std::size_t end = std::min(n, (blk + 1) * detail::kRowBlock);
      for (std::size_t i = blk * detail::kRowBlock; i < end; ++i) {
        double* row = log_d.data() + detail::upper_row_offset(n, i);
        for (std::size_t j = i + 1; j < n; ++j) row[j - i - 1] = std::log(provider(i, j));
      }
    });
  }
  auto mean_degree = [&](double b) {
    if (log_d.empty()) return expected_mean_degree(provider, alpha, b);
    const double log_b = std::log(b);
    const double upper = ordered_block_sum<double>(
        n, detail::kRowBlock, [&](std::size_t begin, std::size_t end) {
          double acc = 0.0;
          for (std::size_t i = begin; i < end; ++i) {
            const double* row = log_d.data() + detail::upper_row_offset(n, i);
            for (std::size_t j = 0; j < n - i - 1; ++j)
              acc += detail::sda_from_log_ratio(row[j] - log_b, alpha);
          }
          return acc;
        });
    return 2.0 * upper / static_cast<double>(n);
  };

  Calibration best;
  double best_gap = std::numeric_limits<double>::infinity();
  auto evaluate = [&](double b) {
    const double k = mean_degree(b);
    const double gap = std::abs(k - target_mean_degree);
    if (gap < best_gap) {
      best_gap = gap;
      best.b = b;
      best.mean_degree = k;
    }
    return k;
  };
  auto finish = [&](bool converged) {
    best.converged = converged;
    return best;
  };

  double lo = detail::bracket_start(provider);
  double hi = lo;
  double k0 = evaluate(lo);
  if (std::abs(k0 - target_mean_degree) <= tol) return finish(true);
  if (k0 < target_mean_degree) {
    for (double k = k0; k < target_mean_degree;) {
      if (++best.expansions > kMaxBracketExpansions)
        throw CalibrationError("calibrate_b: no upper bracket after max expansions");
      lo = hi;
      hi *= 2.0;
      k = evaluate(hi);
      if (std::abs(k - target_mean_degree) <= tol) return finish(true);
    }
  } else {
    for (double k = k0; k > target_mean_degree;) {
      if (++best.expansions > kMaxBracketExpansions)
        throw CalibrationError("calibrate_b: no lower bracket after max expansions "
                               "(degenerate distance distribution)");
      hi = lo;
      lo *= 0.5;
      k = evaluate(lo);
      if (std::abs(k - target_mean_degree) <= tol) return finish(true);
    }
  }

  while (best.iterations < kMaxBisectionIterations) {
    ++best.iterations;
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;  // bracket collapsed to adjacent doubles
    const double k = evaluate(mid);
    if (std::abs(k - target_mean_degree) <= tol) return finish(true);
    (k < target_mean_degree ? lo : hi) = mid;
  }
  return finish(best_gap <= tol);
}

struct SDAParams {
  Alpha alpha{2.0};
  double b = 1.0;
  std::optional<double> target_mean_degree;
};

/// Symmetric N x N connection probabilities with a zero diagonal.
class ProbabilityMatrix {
 public:
  explicit ProbabilityMatrix(std::size_t n) : n_(n), p_(n * n, 0.0) {}

  /// Validates symmetry, zero diagonal and range.
  static ProbabilityMatrix from_values(std::size_t n, std::vector<double> values) {
    detail::require(values.size() == n * n, "ProbabilityMatrix: need N*N values");
    ProbabilityMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
      detail::require(values[i * n + i] == 0.0, "ProbabilityMatrix: diagonal must be zero");
      for (std::size_t j = i + 1; j < n; ++j) {
        const double p = values[i * n + j];
        detail::require(p == values[j * n + i], "ProbabilityMatrix: must be symmetric");
        detail::require(p >= 0.0 && p <= 1.0, "ProbabilityMatrix: entries must lie in [0,1]");
      }
    }
    m.p_ = std::move(values);
    return m;
  }

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return p_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const noexcept { return {p_.data() + i * n_, n_}; }
  std::span<const double> values() const noexcept { return p_; }

  void set(std::size_t i, std::size_t j, double p) {
    detail::require(i < n_ && j < n_ && i != j, "ProbabilityMatrix::set: bad index pair");
    detail::require(p >= 0.0 && p <= 1.0, "ProbabilityMatrix::set: p must lie in [0,1]");
    p_[i * n_ + j] = p;
    p_[j * n_ + i] = p;
  }

 private:
  std::size_t n_;
  std::vector<double> p_;
};

inline ProbabilityMatrix probability_matrix(const DistanceProvider& provider,
                                            const SDAParams& params,
                                            std::uint64_t memory_cap = kDefaultMemoryCap) {
  const std::size_t n = provider.size();
  detail::require(params.b > 0.0, "probability_matrix: b must be > 0");
  if (!fits_dense(n, memory_cap))
    throw MemoryCapExceeded("probability matrix for N=" + std::to_string(n) +
                            " exceeds the memory cap");
  ProbabilityMatrix m(n);
  std::vector<double> values(n * n, 0.0);
  const double log_b = std::log(params.b);
  parallel_blocks((n + detail::kRowBlock - 1) / detail::kRowBlock, [&](std::size_t blk) {
    const std::size_t end = std::min(n, (blk + 1) * detail::kRowBlock);
    for (std::size_t i = blk * detail::kRowBlock; i < end; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        values[i * n + j] = detail::sda_from_log_ratio(std::log(provider(i, j)) - log_b, params.alpha);
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) values[j * n + i] = values[i * n + j];
  return ProbabilityMatrix::from_values(n, std::move(values));
}

/// Independent Bernoulli draw per unordered pair, scanned as i < j in
/// row-major order with one uniform draw per pair.
inline Graph sample_graph(const ProbabilityMatrix& probs, std::uint64_t seed) {
  const std::size_t n = probs.size();
  Rng rng(seed);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = probs.row(i);
    for (std::size_t j = i + 1; j < n; ++j)
      if (uniform01(rng) < row[j])
        edges.push_back({static_cast<NodeId>(i), static_cast<NodeId>(j)});
  }
  return Graph::from_edges(n, edges);
}

struct RewireParams {
  double p_rewire = 0.0;
  std::uint64_t seed = 0;
};

struct RewireStats {
  std::size_t selected = 0;
  std::size_t rewired = 0;
  /// Selected edges restored because the chosen endpoint was adjacent to
  /// every other node.
  std::size_t skipped = 0;
};

/// Random edge rewiring. Edges are visited in a seeded shuffled order; each
/// is selected with probability p_rewire, removed, and replaced by an edge
/// from one of its endpoints (chosen with probability 1/2) to a uniformly
/// chosen node not currently adjacent to it. The removed edge is itself a
/// valid candidate.
inline Graph rewire(const Graph& graph, const RewireParams& params, RewireStats* stats = nullptr) {
  detail::require(params.p_rewire >= 0.0 && params.p_rewire <= 1.0,
                  "rewire: p_rewire must lie in [0,1]");
  RewireStats local;
  Graph out = graph;
  const std::size_t n = graph.num_nodes();
  if (params.p_rewire > 0.0) {
    Rng rng(params.seed);
    std::vector<Edge> order = graph.edges();
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[uniform_index(rng, i)]);
    for (const Edge& e : order) {
      if (!(uniform01(rng) < params.p_rewire)) continue;
      ++local.selected;
      out.remove_edge(e.u, e.v);
      const NodeId from = uniform01(rng) < 0.5 ? e.u : e.v;
      if (out.degree(from) + 1 >= n) {
        out.add_edge(e.u, e.v);
        ++local.skipped;
        continue;
      }
      NodeId to = from;
      while (to == from || out.has_edge(from, to)) to = static_cast<NodeId>(uniform_index(rng, n));
      out.add_edge(from, to);
      ++local.rewired;
    }
  }
  if (stats) *stats = local;
  return out;
}

}  // namespace sdnet
