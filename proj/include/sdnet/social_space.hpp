#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sdnet/error.hpp"
#include "sdnet/rng.hpp"

namespace sdnet {

enum class SpaceFamily { Uniform, GaussianClusters, Lognormal };

inline std::string_view to_string(SpaceFamily family) {
  switch (family) {
    case SpaceFamily::Uniform: return "uniform";
    case SpaceFamily::GaussianClusters: return "clusters";
    case SpaceFamily::Lognormal: return "lognormal";
  }
  throw InvalidArgument("unknown space family");
}

inline SpaceFamily parse_space_family(std::string_view name) {
  if (name == "uniform") return SpaceFamily::Uniform;
  if (name == "clusters" || name == "gaussian_clusters" || name == "gaussian")
    return SpaceFamily::GaussianClusters;
  if (name == "lognormal") return SpaceFamily::Lognormal;
  throw InvalidArgument("unknown space family '" + std::string(name) + "'");
}

// Geometry of the clustered space: centroids ~ Normal(0, 4^2 I), agents ~
// Normal(centroid, I).
inline constexpr double kCentroidSd = 4.0;
inline constexpr double kWithinClusterSd = 1.0;
inline constexpr std::size_t kDefaultClusterCount = 4;

struct SpaceSpec {
  SpaceFamily family = SpaceFamily::Uniform;
  std::size_t dims = 1;
  std::size_t n_agents = 2;
  std::uint64_t seed = 0;
  std::size_t cluster_count = kDefaultClusterCount;
};

/// Agent coordinates in an m-dimensional latent space, stored row-major
/// (one row per agent).
class SocialSpace {
 public:
  SocialSpace(std::size_t n_agents, std::size_t dims, std::vector<double> coords,
              std::vector<std::size_t> cluster_labels = {})
      : n_(n_agents), m_(dims), coords_(std::move(coords)),
        labels_(std::move(cluster_labels)) {
    detail::require(n_ >= 2, "a social space needs at least 2 agents");
    detail::require(m_ >= 1, "a social space needs at least 1 dimension");
    detail::require(coords_.size() == n_ * m_, "coordinate count must equal N*m");
    detail::require(labels_.empty() || labels_.size() == n_,
                    "cluster labels must be empty or one per agent");
    for (double x : coords_)
      detail::require(std::isfinite(x), "coordinates must be finite");
  }

  std::size_t n_agents() const noexcept { return n_; }
  std::size_t dims() const noexcept { return m_; }

  double coord(std::size_t agent, std::size_t dim) const noexcept {
    return coords_[agent * m_ + dim];
  }
  std::span<const double> point(std::size_t agent) const noexcept {
    return {coords_.data() + agent * m_, m_};
  }
  std::span<const double> coords() const noexcept { return coords_; }

  /// Cluster label per agent; empty for unclustered families.
  std::span<const std::size_t> cluster_labels() const noexcept { return labels_; }

  friend bool operator==(const SocialSpace&, const SocialSpace&) = default;

 private:
  std::size_t n_;
  std::size_t m_;
  std::vector<double> coords_;
  std::vector<std::size_t> labels_;
};

/// Draws agent positions. Uniform: i.i.d. U[0,1) per coordinate. Clusters:
/// agent i belongs to cluster i mod k; centroids are drawn first, then the
/// agents row by row. Lognormal: i.i.d. standard lognormal per coordinate.
inline SocialSpace sample_space(const SpaceSpec& spec) {
  detail::require(spec.n_agents >= 2, "sample_space: N must be >= 2");
  detail::require(spec.dims >= 1, "sample_space: m must be >= 1");
  const std::size_t n = spec.n_agents;
  const std::size_t m = spec.dims;
  Rng rng(spec.seed);
  std::vector<double> coords(n * m);
  std::vector<std::size_t> labels;

  switch (spec.family) {
    case SpaceFamily::Uniform:
      for (double& x : coords) x = uniform01(rng);
      break;
    case SpaceFamily::GaussianClusters: {
      detail::require(spec.cluster_count >= 1, "sample_space: cluster_count must be >= 1");
      const std::size_t k = spec.cluster_count;
      std::normal_distribution<double> centroid_dist(0.0, kCentroidSd);
      std::normal_distribution<double> noise(0.0, kWithinClusterSd);
      std::vector<double> centroids(k * m);
      for (double& c : centroids) c = centroid_dist(rng);
      labels.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        labels[i] = i % k;
        for (std::size_t d = 0; d < m; ++d)
          coords[i * m + d] = centroids[labels[i] * m + d] + noise(rng);
      }
      break;
    }
    case SpaceFamily::Lognormal: {
      std::lognormal_distribution<double> dist(0.0, 1.0);
      for (double& x : coords) x = dist(rng);
      break;
    }
    default:
      throw InvalidArgument("sample_space: invalid space family");
  }
  return SocialSpace(n, m, std::move(coords), std::move(labels));
}

enum class Metric { Euclidean, Manhattan };

inline std::string_view to_string(Metric metric) {
  return metric == Metric::Euclidean ? "euclidean" : "manhattan";
}

inline Metric parse_metric(std::string_view name) {
  if (name == "euclidean") return Metric::Euclidean;
  if (name == "manhattan") return Metric::Manhattan;
  throw InvalidArgument("unknown metric '" + std::string(name) + "'");
}

namespace detail {

// Coordinates are accumulated in dimension order so dense and on-demand
// backings agree bit for bit.
inline double distance_unchecked(std::span<const double> a, std::span<const double> b,
                                 Metric metric) noexcept {
  double acc = 0.0;
  if (metric == Metric::Euclidean) {
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double diff = a[k] - b[k];
      acc += diff * diff;
    }
    return std::sqrt(acc);
  }
  for (std::size_t k = 0; k < a.size(); ++k) acc += std::abs(a[k] - b[k]);
  return acc;
}

}  // namespace detail

inline double pairwise_distance(const SocialSpace& space, std::size_t i, std::size_t j,
                                Metric metric) {
  if (i >= space.n_agents() || j >= space.n_agents())
    throw InvalidArgument("pairwise_distance: index out of range");
  if (i == j) return 0.0;
  return detail::distance_unchecked(space.point(i), space.point(j), metric);
}

inline constexpr std::uint64_t kDefaultMemoryCap = std::uint64_t{2} << 30;  // 2 GiB

/// Bytes needed for a full N x N matrix of doubles.
constexpr std::uint64_t dense_matrix_bytes(std::size_t n) {
  return static_cast<std::uint64_t>(n) * n * sizeof(double);
}

constexpr bool fits_dense(std::size_t n, std::uint64_t memory_cap) {
  return dense_matrix_bytes(n) <= memory_cap;
}

enum class DistanceMode { Dense, OnDemand };

class DistanceProvider {
 public:
  DistanceProvider(SocialSpace space, Metric metric, DistanceMode mode)
      : space_(std::move(space)), metric_(metric), mode_(mode) {
    if (mode_ == DistanceMode::Dense) {
      const std::size_t n = space_.n_agents();
      dense_.assign(n * n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          const double d = detail::distance_unchecked(space_.point(i), space_.point(j), metric_);
          dense_[i * n + j] = d;
          dense_[j * n + i] = d;
        }
      }
    }
  }

  std::size_t size() const noexcept { return space_.n_agents(); }
  Metric metric() const noexcept { return metric_; }
  DistanceMode mode() const noexcept { return mode_; }
  const SocialSpace& space() const noexcept { return space_; }

  /// Unchecked lookup.
  double operator()(std::size_t i, std::size_t j) const noexcept {
    if (mode_ == DistanceMode::Dense) return dense_[i * space_.n_agents() + j];
    if (i == j) return 0.0;
    // Always accumulate from the lower index so d(i,j) and d(j,i) match.
    if (i > j) std::swap(i, j);
    return detail::distance_unchecked(space_.point(i), space_.point(j), metric_);
  }

  double at(std::size_t i, std::size_t j) const {
    if (i >= size() || j >= size()) throw InvalidArgument("DistanceProvider: index out of range");
    return (*this)(i, j);
  }

 private:
  SocialSpace space_;
  Metric metric_;
  DistanceMode mode_;
  std::vector<double> dense_;
};

inline DistanceProvider build_distance_provider(const SocialSpace& space, Metric metric,
                                                DistanceMode mode,
                                                std::uint64_t memory_cap = kDefaultMemoryCap) {
  if (mode == DistanceMode::Dense && !fits_dense(space.n_agents(), memory_cap)) {
    throw MemoryCapExceeded("dense distance matrix for N=" + std::to_string(space.n_agents()) +
                            " needs " + std::to_string(dense_matrix_bytes(space.n_agents())) +
                            " bytes, cap is " + std::to_string(memory_cap));
  }
  return DistanceProvider(space, metric, mode);
}

/// Dense when the matrix fits under the cap, on-demand otherwise.
inline DistanceProvider build_distance_provider(const SocialSpace& space, Metric metric,
                                                std::uint64_t memory_cap = kDefaultMemoryCap) {
  const auto mode = fits_dense(space.n_agents(), memory_cap) ? DistanceMode::Dense
                                                             : DistanceMode::OnDemand;
  return DistanceProvider(space, metric, mode);
}

/// CSV with header `agent,dim0,...,dim{m-1}` at 17 significant digits.
inline void write_space_csv(std::ostream& out, const SocialSpace& space) {
  out << "agent";
  for (std::size_t d = 0; d < space.dims(); ++d) out << ",dim" << d;
  out << '\n';
  const auto saved = out.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < space.n_agents(); ++i) {
    out << i;
    for (double x : space.point(i)) out << ',' << x;
    out << '\n';
  }
  out.precision(saved);
}

}  // namespace sdnet
