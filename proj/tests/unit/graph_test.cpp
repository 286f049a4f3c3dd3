#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "spectral_limits/errors.hpp"
#include "spectral_limits/graph.hpp"
#include "test_graphs.hpp"

using namespace spectral_limits;
using namespace spectral_limits::testing;
using std::numbers::pi;

namespace {

std::vector<Edge> brute_force_edges(const PointCloud& cloud, DistanceMetric metric, double eps) {
  std::vector<Edge> out;
  for (Index i = 0; i < cloud.n(); ++i) {
    for (Index j = i + 1; j < cloud.n(); ++j) {
      const double d = metric == DistanceMetric::embedded
                           ? embedding_distance(cloud.manifold, cloud.points[i], cloud.points[j])
                           : geodesic_distance(cloud.manifold, cloud.points[i], cloud.points[j]);
      if (d < eps) out.emplace_back(i, j);
    }
  }
  return out;
}

Eigen::VectorXd random_vector(Eigen::Index n, Xoshiro256& rng) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

}  // namespace

TEST(BuildEdges, CollinearExample) {
  const auto edges = build_edges(collinear_points(), 1.0);
  ASSERT_EQ(edges.size(), 2U);
  EXPECT_EQ(edges[0], Edge(0, 1));
  EXPECT_EQ(edges[1], Edge(1, 2));
  const auto g = gamma_N_from_edges(3, 1, 1.0, edges);
  EXPECT_EQ(g.degree(0), 1U);
  EXPECT_EQ(g.degree(1), 2U);
  EXPECT_EQ(g.degree(2), 1U);
}

TEST(BuildEdges, SmallEpsAndStrictInequality) {
  EXPECT_TRUE(build_edges(collinear_points(), 0.4).empty());
  EXPECT_TRUE(build_edges({{0.0}, {0.5}}, 0.5).empty());
  EXPECT_EQ(build_edges({{0.0}, {0.5}}, 0.5000001).size(), 1U);
}

TEST(BuildEdges, MatchesBruteForce) {
  for (const auto& mfd : {ManifoldModel::circle(1.0), ManifoldModel::sphere(2, 1.0),
                          ManifoldModel::flat_torus({1.0, 1.0}), ManifoldModel::spindle(3)}) {
    const auto cloud = sample_dataset(mfd, DensitySpec::uniform(), 400, 8);
    for (auto metric : {DistanceMetric::embedded, DistanceMetric::geodesic}) {
      for (double eps : {0.05, 0.2, 0.5}) {
        EXPECT_EQ(build_edges(cloud, metric, eps), brute_force_edges(cloud, metric, eps)) << mfd.tag();
        EXPECT_EQ(build_edges(cloud, metric, eps, 3), build_edges(cloud, metric, eps, 1)) << mfd.tag();
      }
    }
  }
}

TEST(BuildEdges, EmbeddedSupersetOfGeodesic) {
  for (const auto& mfd : {ManifoldModel::circle(1.0), ManifoldModel::sphere(2, 1.0), ManifoldModel::spindle(2)}) {
    const auto cloud = sample_dataset(mfd, DensitySpec::uniform(), 600, 2);
    const auto emb = build_edges(cloud, DistanceMetric::embedded, 0.3);
    const auto geo = build_edges(cloud, DistanceMetric::geodesic, 0.3);
    EXPECT_TRUE(std::includes(emb.begin(), emb.end(), geo.begin(), geo.end())) << mfd.tag();
  }
}

TEST(GammaM, SpecWeights) {
  const auto g = gamma_m_from_edges(3, 1, 1.0, 2.0 * pi, build_edges(collinear_points(), 1.0));
  for (double w : g.w_V()) EXPECT_NEAR(w, 1.0 / 3.0, 1e-15);
  for (double w : g.w_E()) EXPECT_NEAR(w, pi / 6.0, 1e-15);
  EXPECT_EQ(g.kind(), GraphKind::gamma_m);
}

TEST(GammaM, UnitTotalVertexWeight) {
  const auto cloud = sample_dataset(ManifoldModel::sphere(), DensitySpec::uniform(), 321, 1);
  const auto g = gamma_m_eps(cloud, 0.3, 4.0 * pi);
  EXPECT_NEAR(graph_volume(g), 1.0, 1e-12);
  const auto [lo, hi] = std::minmax_element(g.w_E().begin(), g.w_E().end());
  EXPECT_EQ(*lo, *hi);
}

TEST(GammaN, SpecWeights) {
  const auto g = gamma_N_from_edges(3, 1, 1.0, build_edges(collinear_points(), 1.0));
  EXPECT_NEAR(g.w_V()[0], 1.0 / 12.0, 1e-15);
  EXPECT_NEAR(g.w_V()[1], 2.0 / 12.0, 1e-15);
  EXPECT_NEAR(g.w_V()[2], 1.0 / 12.0, 1e-15);
  for (double w : g.w_E()) EXPECT_NEAR(w, 1.0 / 12.0, 1e-15);
}

TEST(GammaN, HandshakeVolume) {
  const auto cloud = sample_dataset(ManifoldModel::circle(), DensitySpec::uniform(), 500, 3);
  const double eps = 0.1;
  const auto g = gamma_N_eps(cloud, eps);
  EXPECT_NEAR(graph_volume(g), 2.0 * g.n_edges() / graph_normalizer(500, 1, eps), 1e-12);
  EXPECT_NEAR(graph_normalizer(500, 1, eps), 500.0 * 499.0 * 2.0 * eps, 1e-9);
}

TEST(GammaN, EmptyEdgeSetIsDegenerate) {
  const auto g = gamma_N_from_edges(4, 2, 0.1, {});
  EXPECT_TRUE(g.degenerate());
  for (double w : g.w_V()) EXPECT_EQ(w, 0.0);
  EXPECT_EQ(g.isolated_vertices().size(), 4U);
}

TEST(WeightedGraph, RejectsMalformedInput) {
  EXPECT_THROW(WeightedGraph(2, 1.0, {{0, 0}}, {1, 1}, {1}), GraphError);
  EXPECT_THROW(WeightedGraph(2, 1.0, {{0, 2}}, {1, 1}, {1}), GraphError);
  EXPECT_THROW(WeightedGraph(2, 1.0, {{0, 1}, {0, 1}}, {1, 1}, {1, 1}), GraphError);
  EXPECT_THROW(WeightedGraph(2, 0.0, {{0, 1}}, {1, 1}, {1}), GraphError);
  EXPECT_THROW(WeightedGraph(2, 1.0, {{0, 1}}, {1, -1}, {1}), GraphError);
}

TEST(LaplacianApply, KnownValues) {
  const auto two = unit_graph(2, 1.0, {{0, 1}});
  Eigen::VectorXd phi(2);
  phi << 1.0, 0.0;
  const auto y = laplacian_apply(two, phi);
  EXPECT_NEAR(y[0], 2.0, 1e-15);
  EXPECT_NEAR(y[1], -2.0, 1e-15);

  const auto path = gamma_N_from_edges(3, 1, 1.0, build_edges(collinear_points(), 1.0));
  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(3);
  e0[0] = 1.0;
  EXPECT_NEAR(laplacian_apply(path, e0)[0], 2.0, 1e-14);
  EXPECT_NEAR(laplacian_apply(path, Eigen::VectorXd::Constant(3, 4.0)).norm(), 0.0, 1e-14);
}

TEST(LaplacianApply, SelfAdjointAndPositive) {
  const auto cloud = sample_dataset(ManifoldModel::sphere(), DensitySpec::uniform(), 400, 4);
  for (const auto& g : {gamma_N_eps(cloud, 0.4), gamma_m_eps(cloud, 0.4, 4.0 * pi)}) {
    Xoshiro256 rng(9);
    for (int t = 0; t < 20; ++t) {
      const auto phi = random_vector(400, rng);
      const auto psi = random_vector(400, rng);
      const double a = inner_product(g, laplacian_apply(g, phi), psi);
      const double b = inner_product(g, phi, laplacian_apply(g, psi));
      EXPECT_NEAR(a, b, 1e-10 * std::max(1.0, std::fabs(a)));
      EXPECT_GE(inner_product(g, phi, laplacian_apply(g, phi)), -1e-12);
    }
  }
}

TEST(RandomWalkMatrix, MatchesGammaN) {
  const auto cloud = sample_dataset(ManifoldModel::circle(), DensitySpec::uniform(), 500, 5);
  const double eps = epsilon_schedule(500, 1);
  const auto L = random_walk_matrix(cloud, eps);
  const auto g = gamma_N_eps(cloud, eps);
  Xoshiro256 rng(1);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto phi = random_vector(500, rng);
    worst = std::max(worst, (L.apply(phi) - laplacian_apply(g, phi)).cwiseAbs().maxCoeff());
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(RandomWalkMatrix, PathRowAndKernel) {
  const auto cloud_edges = build_edges(collinear_points(), 1.0);
  const RandomWalkMatrix L(3, 1.0, cloud_edges);
  Eigen::VectorXd e0 = Eigen::VectorXd::Zero(3);
  e0[0] = 1.0;
  EXPECT_NEAR(L.apply(e0)[0], 2.0, 1e-15);
  EXPECT_EQ(L.apply(Eigen::VectorXd::Ones(3)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(RandomWalkMatrix, SpectrumInRange) {
  const auto cloud = sample_dataset(ManifoldModel::flat_torus({1.0, 1.0}), DensitySpec::uniform(), 300, 6);
  const double eps = 0.15;
  const auto L = random_walk_matrix(cloud, eps);
  const Eigen::VectorXd ev = L.to_dense().eigenvalues().real();
  EXPECT_GE(ev.minCoeff(), -1e-9);
  EXPECT_LE(ev.maxCoeff(), 4.0 / (eps * eps) + 1e-9);
}

TEST(GraphDistance, HopsTimesEps) {
  const auto path = path_graph(3, 0.5);
  EXPECT_EQ(graph_distance(path, 0, 1), 0.5);
  EXPECT_EQ(graph_distance(path, 0, 2), 1.0);
  const auto split = unit_graph(4, 1.0, {{0, 1}, {2, 3}});
  EXPECT_EQ(graph_distance(split, 0, 3), kInfiniteDistance);
  EXPECT_FALSE(split.connected());
  std::size_t comps = 0;
  const auto labels = split.component_labels(&comps);
  EXPECT_EQ(comps, 2U);
  EXPECT_EQ(labels[1], labels[0]);
  EXPECT_NE(labels[2], labels[0]);
}

TEST(Ball, StrictRadius) {
  const auto k5 = complete_graph(5);
  EXPECT_EQ(ball(k5, 2, 1.5).size(), 5U);
  EXPECT_EQ(ball(k5, 2, 1.0), std::vector<Index>{2});
  const auto ends = ball(k5, 3, 0.5);
  ASSERT_EQ(ends.size(), 1U);
  EXPECT_EQ(graph_volume(k5, ends), k5.w_V()[3]);
  EXPECT_EQ(graph_volume(k5, std::vector<Index>{}), 0.0);
}

TEST(DirichletEnergy, Examples) {
  const auto two = unit_graph(2, 1.0, {{0, 1}});
  Eigen::VectorXd phi(2);
  phi << 1.0, 0.0;
  EXPECT_NEAR(dirichlet_energy(two, phi), 2.0, 1e-15);
  EXPECT_NEAR(dirichlet_energy(two, 3.0 * phi), 18.0, 1e-13);
  EXPECT_EQ(dirichlet_energy(two, Eigen::VectorXd::Constant(2, 5.0)), 0.0);
}

TEST(WeightedGraph, HashAndSerialization) {
  const auto a = path_graph(4);
  const auto b = path_graph(4);
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_NE(a.hash(), a.with_scaled_vertex_weights(2.0).hash());
  std::ostringstream edges;
  std::ostringstream vertices;
  write_edges_csv(edges, a);
  write_vertices_csv(vertices, a);
  EXPECT_NE(edges.str().find("i,j,w_E"), std::string::npos);
  EXPECT_NE(vertices.str().find("i,w_V,deg"), std::string::npos);
}
