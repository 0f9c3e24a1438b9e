#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sdnet/sda.hpp"

namespace sdnet {
namespace {

// Four points whose pairwise Manhattan distances are all 2 (and Euclidean
// distances all sqrt 2).
SocialSpace equidistant_four() {
  return SocialSpace(4, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1, 1, 1, 1});
}

std::vector<std::vector<double>> full_matrix(const DistanceProvider& p) {
  std::vector<std::vector<double>> d(p.size(), std::vector<double>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j) d[i][j] = p(i, j);
  return d;
}

TEST(SdaProbability, Examples) {
  EXPECT_DOUBLE_EQ(sda_probability(1.0, Alpha(2), 1.0), 0.5);
  EXPECT_DOUBLE_EQ(sda_probability(0.0, Alpha(8), 1.0), 1.0);
  EXPECT_NEAR(sda_probability(3.0, Alpha(2), 1.0), oracle::sda(3.0, 2.0, 1.0), 1e-15);
  EXPECT_NEAR(sda_probability(3.0, Alpha(2), 1.0), 0.1, 1e-15);
  EXPECT_EQ(sda_probability(0.5, Alpha::infinite(), 1.0), 1.0);
  EXPECT_EQ(sda_probability(1.5, Alpha::infinite(), 1.0), 0.0);
  EXPECT_EQ(sda_probability(1.0, Alpha::infinite(), 1.0), 0.5);
}

TEST(SdaProbability, RejectsBadArguments) {
  EXPECT_THROW(Alpha(0.0), InvalidArgument);
  EXPECT_THROW(Alpha(-1.0), InvalidArgument);
  EXPECT_THROW(Alpha(std::nan("")), InvalidArgument);
  EXPECT_THROW(sda_probability(1.0, Alpha(2), 0.0), InvalidArgument);
  EXPECT_THROW(sda_probability(-1.0, Alpha(2), 1.0), InvalidArgument);
}

TEST(SdaProbability, MatchesPowerFormAndDecreases) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int t = 0; t < 1000; ++t) {
    const double d = u(rng);
    const double b = 0.1 + u(rng);
    const double alpha = 0.5 + u(rng) * 3;
    EXPECT_NEAR(sda_probability(d, Alpha(alpha), b), oracle::sda(d, alpha, b), 1e-12);
  }
  double prev = 1.0;
  for (double d = 0.01; d < 10.0; d += 0.01) {
    const double p = sda_probability(d, Alpha(4), 1.0);
    EXPECT_LT(p, prev);
    prev = p;
  }
}

TEST(SdaProbability, LargeAlphaApproachesStep) {
  for (double ratio : {0.5, 0.9, 1.1, 2.0}) {
    const double step = ratio < 1.0 ? 1.0 : 0.0;
    EXPECT_LT(std::abs(sda_probability(ratio, Alpha(1024), 1.0) - step), 1e-3) << ratio;
  }
  // No overflow for huge alpha.
  EXPECT_EQ(sda_probability(2.0, Alpha(1e6), 1.0), 0.0);
  EXPECT_EQ(sda_probability(0.5, Alpha(1e6), 1.0), 1.0);
}

TEST(SdaProbability, ScaleInvariance) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.01, 3.0);
  for (int t = 0; t < 500; ++t) {
    const double d = u(rng);
    const double b = u(rng);
    const double c = u(rng) * 100;
    const Alpha a(1 + u(rng));
    EXPECT_NEAR(sda_probability(d, a, b), sda_probability(c * d, a, c * b), 1e-12);
  }
}

TEST(FermiDirac, Examples) {
  EXPECT_DOUBLE_EQ(fermi_dirac_probability(1.7, 3.0, 1.7), 0.5);
  EXPECT_NEAR(fermi_dirac_probability(0.0, 2.0, 1.0), 1.0 / (1.0 + std::exp(-2.0)), 1e-15);
  EXPECT_NEAR(fermi_dirac_probability(0.0, 2.0, 1.0), 0.8807970779778823, 1e-15);
  double prev = 1.0;
  for (double d = 0.0; d < 50.0; d += 0.5) {
    const double p = fermi_dirac_probability(d, 1.0, 0.0);
    EXPECT_LT(p, prev);
    prev = p;
  }
  EXPECT_LT(prev, 1e-20);
  EXPECT_THROW(fermi_dirac_probability(1.0, std::numeric_limits<double>::infinity(), 1.0),
               InvalidArgument);
}

TEST(ExpectedMeanDegree, EquidistantFour) {
  const auto p = build_distance_provider(equidistant_four(), Metric::Manhattan);
  EXPECT_DOUBLE_EQ(expected_mean_degree(p, Alpha(2), 2.0), 1.5);
  EXPECT_LT(expected_mean_degree(p, Alpha(2), 1e-9), 1e-12);
  EXPECT_NEAR(expected_mean_degree(p, Alpha(2), 1e9), 3.0, 1e-12);
}

TEST(ExpectedMeanDegree, MatchesDirectDoubleSum) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto family = static_cast<SpaceFamily>(seed % 3);
    const auto p = build_distance_provider(sample_space({family, 2, 40, seed}), Metric::Euclidean);
    const auto d = full_matrix(p);
    for (double alpha : {1.0, 2.0, 8.0}) {
      for (double b : {0.05, 0.3, 1.0}) {
        EXPECT_NEAR(expected_mean_degree(p, Alpha(alpha), b), oracle::expected_degree(d, alpha, b),
                    1e-10);
      }
    }
  }
}

TEST(ExpectedMeanDegree, MonotoneInB) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto p = build_distance_provider(
        sample_space({static_cast<SpaceFamily>(seed % 3), 1 + seed, 60, seed}), Metric::Euclidean);
    for (Alpha a : {Alpha(2), Alpha(8), Alpha::infinite()}) {
      double prev = 0.0;
      for (double b = 0.01; b < 20.0; b *= 1.3) {
        const double k = expected_mean_degree(p, a, b);
        EXPECT_GE(k, prev);
        prev = k;
      }
    }
  }
}

TEST(ExpectedMeanDegree, BackingsAgreeBitForBit) {
  const SocialSpace s = sample_space({SpaceFamily::GaussianClusters, 3, 150, 77});
  const auto dense = build_distance_provider(s, Metric::Euclidean, DistanceMode::Dense);
  const auto lazy = build_distance_provider(s, Metric::Euclidean, DistanceMode::OnDemand);
  EXPECT_EQ(expected_mean_degree(dense, Alpha(4), 1.3), expected_mean_degree(lazy, Alpha(4), 1.3));
}

TEST(CalibrateB, EquidistantAnalyticInversion) {
  const auto p = build_distance_provider(equidistant_four(), Metric::Manhattan);
  // p = 1/2 at b = d = 2.
  const Calibration c1 = calibrate_b(p, Alpha(2), 1.5);
  EXPECT_TRUE(c1.converged);
  EXPECT_NEAR(c1.b, 2.0, 0.02);
  EXPECT_LE(std::abs(c1.mean_degree - 1.5), calibration_tolerance(1.5));
  // p = 0.9 needs (2/b)^2 = 1/9, so b = 6.
  const Calibration c2 = calibrate_b(p, Alpha(2), 2.7);
  EXPECT_TRUE(c2.converged);
  EXPECT_NEAR(c2.b, 6.0, 0.15);
  EXPECT_LE(std::abs(c2.mean_degree - 2.7), calibration_tolerance(2.7));
}

TEST(CalibrateB, UniformThousandAgentsHitsThirty) {
  const auto p = build_distance_provider(sample_space({SpaceFamily::Uniform, 2, 1000, 3}),
                                         Metric::Euclidean);
  for (Alpha a : {Alpha(2), Alpha(8), Alpha::infinite()}) {
    const Calibration c = calibrate_b(p, a, 30.0);
    EXPECT_TRUE(c.converged);
    EXPECT_LE(std::abs(c.mean_degree - 30.0), calibration_tolerance(30.0));
    // Self-consistency against the public evaluator.
    EXPECT_LE(std::abs(expected_mean_degree(p, a, c.b) - 30.0), calibration_tolerance(30.0));
  }
}

TEST(CalibrateB, OnDemandBackingMatches) {
  const SocialSpace s = sample_space({SpaceFamily::Lognormal, 2, 200, 5});
  const auto dense = build_distance_provider(s, Metric::Euclidean, DistanceMode::Dense);
  const auto lazy = build_distance_provider(s, Metric::Euclidean, DistanceMode::OnDemand);
  // A zero cap forces the uncached path.
  const Calibration a = calibrate_b(dense, Alpha(4), 10.0);
  const Calibration b = calibrate_b(lazy, Alpha(4), 10.0, 0);
  EXPECT_EQ(a.b, b.b);
  EXPECT_EQ(a.mean_degree, b.mean_degree);
}

TEST(CalibrateB, Errors) {
  const auto p = build_distance_provider(equidistant_four(), Metric::Manhattan);
  EXPECT_THROW(calibrate_b(p, Alpha(2), 0.0), InvalidArgument);
  EXPECT_THROW(calibrate_b(p, Alpha(2), 3.0), InvalidArgument);
  const SocialSpace same(3, 1, {1.0, 1.0, 1.0});
  EXPECT_THROW(calibrate_b(build_distance_provider(same, Metric::Euclidean), Alpha(2), 1.0),
               CalibrationError);
  // Half the pairs at distance zero keeps E[k] >= 2/3: a lower target cannot
  // be bracketed.
  const SocialSpace dup(3, 1, {0.0, 0.0, 1.0});
  EXPECT_THROW(calibrate_b(build_distance_provider(dup, Metric::Euclidean), Alpha(2), 0.5),
               CalibrationError);
}

TEST(ProbabilityMatrix, Examples) {
  const SocialSpace two(2, 1, {0.0, 1.5});
  const auto m2 = probability_matrix(build_distance_provider(two, Metric::Euclidean), {Alpha(3), 1.5, {}});
  EXPECT_DOUBLE_EQ(m2(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(m2(1, 0), 0.5);
  EXPECT_EQ(m2(0, 0), 0.0);

  // Collinear points 0, 1, 3 give distances 1, 2, 3.
  const SocialSpace three(3, 1, {0.0, 1.0, 3.0});
  const auto m3 =
      probability_matrix(build_distance_provider(three, Metric::Euclidean), {Alpha(2), 1.0, {}});
  EXPECT_NEAR(m3(0, 1), 0.5, 1e-15);
  EXPECT_NEAR(m3(1, 2), 0.2, 1e-15);
  EXPECT_NEAR(m3(0, 2), 0.1, 1e-15);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(m3(i, i), 0.0);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(m3(i, j), m3(j, i));
  }
}

TEST(ProbabilityMatrix, MemoryCap) {
  const auto p = build_distance_provider(sample_space({SpaceFamily::Uniform, 1, 50, 0}),
                                         Metric::Euclidean);
  EXPECT_THROW(probability_matrix(p, {Alpha(2), 0.1, {}}, 50 * 50 * 8 - 1), MemoryCapExceeded);
  EXPECT_THROW(ProbabilityMatrix::from_values(2, {0, 0.3, 0.2, 0}), InvalidArgument);
  EXPECT_THROW(ProbabilityMatrix::from_values(2, {0.1, 0.3, 0.3, 0}), InvalidArgument);
}

TEST(SampleGraph, DegenerateProbabilities) {
  const std::size_t n = 7;
  ProbabilityMatrix zeros(n);
  EXPECT_EQ(sample_graph(zeros, 1).num_edges(), 0u);
  ProbabilityMatrix ones(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) ones.set(i, j, 1.0);
  EXPECT_EQ(sample_graph(ones, 1).num_edges(), n * (n - 1) / 2);
}

TEST(SampleGraph, PairFrequenciesMatchProbabilities) {
  const std::size_t n = 6;
  const auto p = build_distance_provider(sample_space({SpaceFamily::Uniform, 2, n, 12}),
                                         Metric::Euclidean);
  const auto probs = probability_matrix(p, {Alpha(2), 0.4, {}});
  const int runs = 10000;
  std::vector<int> hits(n * n, 0);
  for (int r = 0; r < runs; ++r)
    for (const Edge& e : sample_graph(probs, 1000 + r).edges()) ++hits[e.u * n + e.v];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double q = probs(i, j);
      const double sd = std::sqrt(q * (1 - q) / runs);
      EXPECT_NEAR(hits[i * n + j] / double(runs), q, 4.5 * sd + 1e-9) << i << ',' << j;
    }
}

TEST(SampleGraph, CalibratedMeanDegreeConcentrates) {
  const auto p = build_distance_provider(sample_space({SpaceFamily::Uniform, 2, 1000, 21}),
                                         Metric::Euclidean);
  const Calibration c = calibrate_b(p, Alpha(8), 30.0);
  const auto probs = probability_matrix(p, {Alpha(8), c.b, {}});
  int inside = 0;
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    const Graph g = sample_graph(probs, s);
    const double k = 2.0 * g.num_edges() / 1000.0;
    if (std::abs(k - 30.0) <= 3.0) ++inside;
  }
  EXPECT_GE(inside, 99);
  EXPECT_EQ(sample_graph(probs, 5), sample_graph(probs, 5));
}

bool is_simple(const Graph& g) {
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    const auto nb = g.neighbors(v);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (nb[k] == v) return false;
      if (k && nb[k] == nb[k - 1]) return false;
      if (!g.has_edge(nb[k], v)) return false;
    }
  }
  return true;
}

TEST(Rewire, ZeroProbabilityIsIdentity) {
  std::mt19937_64 rng(1);
  const Graph g = oracle::random_graph(30, 0.2, rng);
  EXPECT_EQ(rewire(g, {0.0, 7}), g);
}

TEST(Rewire, FourCycleFullyRewired) {
  const std::vector<Edge> cycle{{0, 1}, {1, 2}, {2, 3}, {0, 3}};
  const Graph g = Graph::from_edges(4, cycle);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    RewireStats stats;
    const Graph r = rewire(g, {1.0, seed}, &stats);
    EXPECT_EQ(r.num_edges(), 4u);
    EXPECT_TRUE(is_simple(r));
    EXPECT_EQ(stats.selected, 4u);
    EXPECT_EQ(stats.rewired + stats.skipped, 4u);
  }
}

TEST(Rewire, CompleteGraphCanOnlyRecreateItself) {
  std::vector<Edge> edges;
  for (NodeId i = 0; i < 5; ++i)
    for (NodeId j = i + 1; j < 5; ++j) edges.push_back({i, j});
  const Graph k5 = Graph::from_edges(5, edges);
  EXPECT_EQ(rewire(k5, {1.0, 3}), k5);
}

TEST(Rewire, ConservesEdgesAndSimplicity) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 100; ++t) {
    const Graph g = oracle::random_graph(5 + t % 40, 0.05 + 0.01 * (t % 30), rng);
    for (double p : {0.01, 0.3, 1.0}) {
      const Graph r = rewire(g, {p, static_cast<std::uint64_t>(t)});
      EXPECT_EQ(r.num_edges(), g.num_edges());
      EXPECT_TRUE(is_simple(r));
      EXPECT_EQ(r, rewire(g, {p, static_cast<std::uint64_t>(t)}));
    }
  }
  EXPECT_THROW(rewire(Graph(3), {1.5, 0}), InvalidArgument);
}

TEST(Rewire, RewiresAboutTheExpectedShare) {
  std::mt19937_64 rng(3);
  const Graph g = oracle::random_graph(400, 0.05, rng);
  RewireStats stats;
  rewire(g, {0.1, 11}, &stats);
  const double expected = 0.1 * g.num_edges();
  EXPECT_NEAR(stats.selected, expected, 5 * std::sqrt(expected * 0.9));
}

TEST(AlphaText, RoundTrip) {
  EXPECT_EQ(to_string(Alpha::infinite()), "inf");
  EXPECT_EQ(to_string(Alpha(8)), "8");
  EXPECT_EQ(to_string(Alpha(2.5)), "2.5");
  EXPECT_TRUE(parse_alpha("inf").is_infinite());
  EXPECT_EQ(parse_alpha("4").value(), 4.0);
  EXPECT_THROW(parse_alpha("x"), InvalidArgument);
}

}  // namespace
}  // namespace sdnet
