#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "sdnet/sdc.hpp"

namespace sdnet {
namespace {

struct Moments {
  double mean = 0;
  double var = 0;
  double skew = 0;
};

Moments moments(const DegreeSequence& seq) {
  Moments m;
  const double n = static_cast<double>(seq.size());
  for (auto k : seq.degrees) m.mean += static_cast<double>(k);
  m.mean /= n;
  double m3 = 0;
  for (auto k : seq.degrees) {
    const double d = static_cast<double>(k) - m.mean;
    m.var += d * d;
    m3 += d * d * d;
  }
  m.var /= n;
  m3 /= n;
  m.skew = m3 / std::pow(m.var, 1.5);
  return m;
}

ProbabilityMatrix uniform_probs(std::size_t n, double p) {
  ProbabilityMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m.set(i, j, p);
  return m;
}

ProbabilityMatrix space_probs(std::size_t n, std::uint64_t seed, Alpha alpha, double k = 10.0) {
  const auto p = build_distance_provider(sample_space({SpaceFamily::Uniform, 2, n, seed}),
                                         Metric::Euclidean);
  const Calibration c = calibrate_b(p, alpha, k);
  return probability_matrix(p, {alpha, c.b, {}});
}

TEST(PoissonSequence, MomentsAndParity) {
  const DegreeSequence seq = poisson_sequence(10000, 30.0, 1);
  const Moments m = moments(seq);
  EXPECT_GE(m.mean, 29.0);
  EXPECT_LE(m.mean, 31.0);
  EXPECT_GE(m.var / m.mean, 0.9);
  EXPECT_LE(m.var / m.mean, 1.1);
  EXPECT_EQ(seq.family, DegreeFamily::Poisson);
  for (std::uint64_t s = 0; s < 50; ++s) EXPECT_EQ(poisson_sequence(101, 3.3, s).sum() % 2, 0u);
  EXPECT_THROW(poisson_sequence(10, 0.0, 1), InvalidArgument);
}

TEST(NegativeBinomialSequence, MomentsAndParity) {
  const DegreeSequence seq = negative_binomial_sequence(10000, 2);
  const Moments m = moments(seq);
  EXPECT_GE(m.mean, 28.0);
  EXPECT_LE(m.mean, 32.0);
  EXPECT_GT(m.skew, 1.0);
  EXPECT_DOUBLE_EQ(seq.target_mean, 30.0);
  for (std::uint64_t s = 0; s < 50; ++s) EXPECT_EQ(negative_binomial_sequence(99, s).sum() % 2, 0u);
}

TEST(PowerLawSequence, AttachmentEdges) {
  EXPECT_EQ(attachment_edges(30.0), 15u);
  EXPECT_EQ(attachment_edges(2.0), 1u);
}

TEST(PowerLawSequence, MeanBoundsAndParity) {
  const DegreeSequence seq = power_law_sequence(8000, 30.0, 3);
  const Moments m = moments(seq);
  EXPECT_GE(m.mean, 28.0);
  EXPECT_LE(m.mean, 32.0);
  EXPECT_EQ(seq.sum() % 2, 0u);
  EXPECT_LE(*std::max_element(seq.degrees.begin(), seq.degrees.end()), 7999u);
  // Heavy right tail: the hub is far above the mean.
  EXPECT_GT(*std::max_element(seq.degrees.begin(), seq.degrees.end()), 300u);
  EXPECT_GT(m.skew, 2.0);
}

TEST(PowerLawSequence, ClampedToNetworkSize) {
  // Tiny networks push hubs against the N-1 cap; parity must still hold.
  for (std::uint64_t s = 0; s < 200; ++s) {
    const DegreeSequence seq = power_law_sequence(12, 10.0, s);
    EXPECT_EQ(seq.sum() % 2, 0u);
    for (auto k : seq.degrees) EXPECT_LE(k, 11u);
  }
  EXPECT_THROW(power_law_sequence(15, 30.0, 0), InvalidArgument);
  EXPECT_THROW(power_law_sequence(100, 1.0, 0), InvalidArgument);
}

TEST(SdcSample, ThreeNodesTwoStubsEach) {
  const DegreeSequence seq{{2, 2, 2}};
  for (std::uint64_t s = 0; s < 50; ++s) {
    const MultiGraph mg = sdc_sample(uniform_probs(3, 0.5), seq, {kDefaultMalformed, s});
    EXPECT_EQ(mg.num_edges(), 3u);
    EXPECT_EQ(mg.degrees(), seq.degrees);
  }
}

TEST(SdcSample, AllZeroSequence) {
  const MultiGraph mg = sdc_sample(uniform_probs(5, 0.5), DegreeSequence{{0, 0, 0, 0, 0}}, {});
  EXPECT_EQ(mg.num_edges(), 0u);
}

TEST(SdcSample, ExactDegreesOnPoissonSequence) {
  const auto probs = space_probs(100, 4, Alpha(4));
  for (std::uint64_t s = 0; s < 20; ++s) {
    const DegreeSequence seq = poisson_sequence(100, 30.0, s);
    const MultiGraph mg = sdc_sample(probs, seq, {kDefaultMalformed, s});
    // Oracle: re-count degrees straight from the edge multiset.
    std::vector<std::size_t> counted(100, 0);
    for (const Edge& e : mg.edges()) {
      ++counted[e.u];
      ++counted[e.v];
    }
    EXPECT_EQ(counted, seq.degrees);
    EXPECT_EQ(2 * mg.num_edges(), seq.sum());
  }
}

TEST(SdcSample, TerminatesOnUnrealizableSequences) {
  // Not graphical, so loops and multi-edges are forced.
  const std::vector<std::vector<std::size_t>> cases{
      {4, 0, 0}, {6, 2, 0, 0}, {3, 1}, {10, 0, 0, 0, 0, 2}, {5, 5, 0, 0}, {2}};
  for (const auto& degrees : cases) {
    const DegreeSequence seq{degrees};
    const std::size_t n = degrees.size();
    for (std::uint64_t s = 0; s < 20; ++s) {
      const MultiGraph mg = sdc_sample(uniform_probs(n, 0.7), seq, {1e-3, s});
      EXPECT_EQ(mg.degrees(), degrees);
      EXPECT_EQ(2 * mg.num_edges(), seq.sum());
    }
  }
}

TEST(SdcSample, RandomSequencesConserveStubs) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = 2 + t % 30;
    std::uniform_int_distribution<std::size_t> deg(0, n + 3);
    DegreeSequence seq;
    for (std::size_t i = 0; i < n; ++i) seq.degrees.push_back(deg(rng));
    if (seq.sum() % 2) ++seq.degrees[0];
    const Alpha alpha = t % 3 == 0 ? Alpha::infinite() : Alpha(2.0 + t % 7);
    const auto probs = space_probs(n, t, alpha, std::min(3.0, n - 1.5));
    const MultiGraph mg = sdc_sample(probs, seq, {kDefaultMalformed, static_cast<std::uint64_t>(t)});
    EXPECT_EQ(mg.degrees(), seq.degrees);
  }
}

TEST(SdcSample, Deterministic) {
  const auto probs = space_probs(60, 1, Alpha(8));
  const DegreeSequence seq = negative_binomial_sequence(60, 5);
  const MultiGraph a = sdc_sample(probs, seq, {kDefaultMalformed, 9});
  const MultiGraph b = sdc_sample(probs, seq, {kDefaultMalformed, 9});
  EXPECT_TRUE(std::equal(a.edges().begin(), a.edges().end(), b.edges().begin(), b.edges().end()));
}

TEST(SdcSample, Errors) {
  EXPECT_THROW(sdc_sample(uniform_probs(3, 0.5), DegreeSequence{{1, 1, 1}}, {}), InvalidArgument);
  EXPECT_THROW(sdc_sample(uniform_probs(3, 0.5), DegreeSequence{{1, 1}}, {}), InvalidArgument);
  EXPECT_THROW(sdc_sample(uniform_probs(2, 0.5), DegreeSequence{{1, 1}}, {0.0, 0}), InvalidArgument);
}

std::vector<double> ranks(const std::vector<double>& x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t k = 0; k < idx.size();) {
    std::size_t e = k;
    while (e + 1 < idx.size() && x[idx[e + 1]] == x[idx[k]]) ++e;
    for (std::size_t q = k; q <= e; ++q) r[idx[q]] = 0.5 * static_cast<double>(k + e);
    k = e + 1;
  }
  return r;
}

TEST(SdcSample, EdgeFrequencyFollowsProbability) {
  const std::size_t n = 20;
  const auto probs = space_probs(n, 33, Alpha(4), 4.0);
  const DegreeSequence seq{std::vector<std::size_t>(n, 4)};
  std::vector<double> freq(n * n, 0.0);
  for (std::uint64_t r = 0; r < 10000; ++r) {
    const MultiGraph mg = sdc_sample(probs, seq, {kDefaultMalformed, r});
    for (const Edge& e : mg.edges())
      if (e.u != e.v) freq[e.u * n + e.v] += 1.0;
  }
  std::vector<double> p;
  std::vector<double> f;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      p.push_back(probs(i, j));
      f.push_back(freq[i * n + j]);
    }
  const auto rp = ranks(p);
  const auto rf = ranks(f);
  double mp = 0, mf = 0;
  for (std::size_t k = 0; k < rp.size(); ++k) {
    mp += rp[k];
    mf += rf[k];
  }
  mp /= rp.size();
  mf /= rf.size();
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t k = 0; k < rp.size(); ++k) {
    sxy += (rp[k] - mp) * (rf[k] - mf);
    sxx += (rp[k] - mp) * (rp[k] - mp);
    syy += (rf[k] - mf) * (rf[k] - mf);
  }
  EXPECT_GT(sxy / std::sqrt(sxx * syy), 0.5);
}

TEST(Simplify, DropsLoopsAndParallels) {
  MultiGraph mg(2);
  mg.add_edge(0, 1);
  mg.add_edge(1, 0);
  mg.add_edge(1, 1);
  const SimplifyResult r = simplify(mg);
  EXPECT_EQ(r.graph.edges(), (std::vector<Edge>{{0, 1}}));
  EXPECT_EQ(r.loops_removed, 1u);
  EXPECT_EQ(r.parallel_removed, 1u);
}

TEST(Simplify, IdempotentOnSimpleInput) {
  MultiGraph mg(5);
  mg.add_edge(0, 1);
  mg.add_edge(3, 2);
  mg.add_edge(4, 0);
  const SimplifyResult once = simplify(mg);
  EXPECT_EQ(once.loops_removed + once.parallel_removed, 0u);
  MultiGraph again(5);
  for (const Edge& e : once.graph.edges()) again.add_edge(e.u, e.v);
  EXPECT_EQ(simplify(again).graph, once.graph);
  EXPECT_LE(once.graph.num_edges(), mg.num_edges());
}

TEST(Simplify, SmallLossAtThousandNodes) {
  const auto probs = space_probs(1000, 6, Alpha(8), 30.0);
  for (std::uint64_t s = 0; s < 3; ++s) {
    const MultiGraph mg = sdc_sample(probs, poisson_sequence(1000, 30.0, s), {kDefaultMalformed, s});
    const SimplifyResult r = simplify(mg);
    const double lost = static_cast<double>(r.loops_removed + r.parallel_removed);
    EXPECT_LT(lost / static_cast<double>(mg.num_edges()), 0.01);
  }
}

TEST(DegreeSequenceIo, RoundTrip) {
  const DegreeSequence seq = poisson_sequence(30, 4.0, 1);
  std::stringstream buf;
  write_degree_sequence(buf, seq);
  const DegreeSequence back = read_degree_sequence(buf);
  EXPECT_EQ(back.degrees, seq.degrees);
  EXPECT_EQ(back.family, DegreeFamily::UserProvided);
  std::istringstream bad("3\n-1\n");
  EXPECT_THROW(read_degree_sequence(bad), IoError);
}

TEST(MultiGraphIo, RepeatsParallelsAndLoops) {
  MultiGraph mg(3);
  mg.add_edge(2, 1);
  mg.add_edge(0, 0);
  mg.add_edge(1, 2);
  std::ostringstream out;
  write_edge_list(out, mg);
  EXPECT_EQ(out.str(), "# n_nodes=3\n0 0\n1 2\n1 2\n");
}

}  // namespace
}  // namespace sdnet
