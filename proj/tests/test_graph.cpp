#include <gtest/gtest.h>

#include <set>

#include "oracle.hpp"

using namespace netvis;

TEST(Rng, SameStreamSameSequence) {
  Rng a({7, 3}), b({7, 3});
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next(), b.next());
}

TEST(Rng, StreamsDiffer) {
  Rng a(base_stream(7)), b(replica_stream(7, 0)), c(replica_stream(7, 1)), d(base_stream(8));
  const auto x = a.next();
  EXPECT_NE(x, b.next());
  EXPECT_NE(x, c.next());
  EXPECT_NE(x, d.next());
}

TEST(Rng, UniformRanges) {
  Rng r({1, 0});
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = r.uniform_open_low();
    ASSERT_GT(v, 0.0);
    ASSERT_LE(v, 1.0);
  }
}

TEST(Fitness, ParetoQuantile) {
  const auto d = FitnessDistribution::pareto(2.0);
  EXPECT_DOUBLE_EQ(d.draw(1.0), 1.0);
  EXPECT_DOUBLE_EQ(d.draw(0.25), 2.0);
  EXPECT_DOUBLE_EQ(FitnessDistribution::pareto(1.0).draw(0.1), 10.0);
}

TEST(Fitness, ParetoMeanForAlpha3) {
  const auto d = FitnessDistribution::pareto(3.0);
  Rng r({5, 0});
  double s = 0.0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) s += d.draw(r.uniform_open_low());
  EXPECT_NEAR(s / n, 1.5, 0.01);
}

TEST(Fitness, RejectsBadParameters) {
  EXPECT_THROW(FitnessDistribution::pareto(0.0).validate(), ConfigError);
  EXPECT_THROW(FitnessDistribution::pareto(-1.0).validate(), ConfigError);
  EXPECT_NO_THROW(FitnessDistribution::constant(1.0).validate());
  EXPECT_DOUBLE_EQ(FitnessDistribution::constant(3.0).draw(0.4), 3.0);
}

TEST(Graph, SeedGraphInvariants) {
  Rng r(base_stream(1));
  const GraphState g = new_seed_graph(KernelSpec::mf(), FitnessDistribution::pareto(2.0), r, true);
  EXPECT_EQ(g.time, 1u);
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g[0].degree, 1u);
  EXPECT_EQ(g[1].degree, 1u);
  ASSERT_TRUE(g.edges);
  EXPECT_EQ(g.edges->size(), 1u);
  EXPECT_FALSE(check_invariants(g));
}

TEST(Graph, InvariantViolationsReported) {
  GraphState g = oracle::path3();
  EXPECT_FALSE(check_invariants(g));
  g.nodes[1].degree = 3;
  EXPECT_TRUE(check_invariants(g));
  g = oracle::path3();
  g.time = 3;
  EXPECT_TRUE(check_invariants(g));
}

TEST(Kernels, AttractivenessPerKind) {
  EXPECT_DOUBLE_EQ(attractiveness(KernelSpec::ba(), 3.0, 2.0), 2.0);
  EXPECT_DOUBLE_EQ(attractiveness(KernelSpec::af(), 3.0, 2.0), 5.0);
  EXPECT_DOUBLE_EQ(attractiveness(KernelSpec::mf(), 3.0, 2.0), 6.0);
  EXPECT_DOUBLE_EQ(attractiveness(KernelSpec::gf(), 3.0, 2.0), 36.0);
  EXPECT_DOUBLE_EQ(attractiveness(KernelSpec::gf(power_attach(1.0)), 3.0, 2.0), 6.0);
  EXPECT_DOUBLE_EQ(attractiveness(KernelSpec::spatial(1.0), 3.0, 2.0), 6.0);
}

TEST(Kernels, SpatialWeightNeedsLocation) {
  const GraphState g = oracle::path3();
  const KernelSpec k = KernelSpec::spatial(2.0);
  EXPECT_THROW(node_weight(g, 0, k), UsageError);
  EXPECT_THROW(node_weight(g, 0, KernelSpec::mf(), Point{0.1, 0.1}), UsageError);
  EXPECT_DOUBLE_EQ(node_weight(g, 0, k, Point{0.1, 0.1}), 1.0);
  EXPECT_NEAR(node_weight(g, 1, k, Point{0.1, 0.1}), 2.0 * std::exp(-2.0 * std::sqrt(0.32)), 1e-15);
}

TEST(Kernels, ParseNames) {
  for (auto k : {KernelKind::BA, KernelKind::AdditiveFitness, KernelKind::MultiplicativeFitness,
                 KernelKind::GeneralFitness, KernelKind::Spatial}) {
    EXPECT_EQ(parse_kernel_kind(to_string(k)), k);
  }
  EXPECT_THROW(parse_kernel_kind("xx"), ConfigError);
  EXPECT_THROW(KernelSpec::spatial(-1.0).validate(), ConfigError);
}

TEST(Kernels, DecompositionMatchesDirectSums) {
  Rng r({11, 0});
  const GraphState g = oracle::random_tree(60, FitnessDistribution::pareto(2.0), r);
  const auto d = decomposition(g, KernelSpec::gf());
  double xi = 0.0, psi = 0.0, gam = 0.0;
  for (const auto& n : g.nodes) {
    xi += n.fitness;
    psi += n.fitness * n.degree;
    gam += (n.fitness * n.degree) * (n.fitness * n.degree);
  }
  EXPECT_NEAR(d.Xi, xi, 1e-12 * xi);
  EXPECT_NEAR(d.psi, psi, 1e-12 * psi);
  EXPECT_NEAR(d.Gamma, gam, 1e-12 * gam);
  ASSERT_EQ(d.delta_g.size(), g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double f = g[i].fitness, D = g[i].degree;
    EXPECT_NEAR(d.delta_g[i], f * f * (2 * D + 1), 1e-12 * f * f * (2 * D + 1));
  }
}

TEST(Parallel, IndexOrderedAndExceptionsPropagate) {
  const auto v = parallel_map(50, 4, [](std::size_t r) { return r * r; });
  for (std::size_t r = 0; r < 50; ++r) EXPECT_EQ(v[r], r * r);
  EXPECT_THROW(parallel_map(10, 3,
                            [](std::size_t r) -> int {
                              if (r == 7) throw ConfigError("boom");
                              return 0;
                            }),
               ConfigError);
}
