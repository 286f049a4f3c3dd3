#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "spectral_limits/sampling.hpp"

namespace spectral_limits {

using Index = std::uint32_t;
using Edge = std::pair<Index, Index>;
using GraphFunction = Eigen::VectorXd;

enum class GraphKind { gamma_m, gamma_N, custom };
enum class DistanceMetric { embedded, geodesic };

std::string to_string(GraphKind kind);
GraphKind graph_kind_from_string(const std::string& name);

inline constexpr double kInfiniteDistance = std::numeric_limits<double>::infinity();

/// Gamma = (V, E, w_V, w_E, eps) with CSR adjacency and a degree cache.
/// Edges are unordered pairs stored as (i, j) with i < j, sorted lexicographically.
class WeightedGraph {
 public:
  WeightedGraph(std::size_t n_vertices, double epsilon, std::vector<Edge> edges,
                std::vector<double> w_V, std::vector<double> w_E, GraphKind kind = GraphKind::custom,
                int manifold_dim = 0);

  std::size_t n_vertices() const noexcept { return w_V_.size(); }
  std::size_t n_edges() const noexcept { return edges_.size(); }
  double epsilon() const noexcept { return epsilon_; }
  GraphKind kind() const noexcept { return kind_; }
  int manifold_dim() const noexcept { return manifold_dim_; }

  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<double>& w_V() const noexcept { return w_V_; }
  const std::vector<double>& w_E() const noexcept { return w_E_; }
  Index degree(Index i) const noexcept { return offsets_[i + 1] - offsets_[i]; }

  /// Neighbors of i in ascending order, with the index of the connecting edge.
  std::span<const Index> neighbors(Index i) const noexcept {
    return {adjacency_.data() + offsets_[i], adjacency_.data() + offsets_[i + 1]};
  }
  std::span<const Index> incident_edges(Index i) const noexcept {
    return {edge_of_slot_.data() + offsets_[i], edge_of_slot_.data() + offsets_[i + 1]};
  }

  /// Vertices with no incident edge. Spectral operations refuse such graphs.
  const std::vector<Index>& isolated_vertices() const noexcept { return isolated_; }
  bool degenerate() const noexcept { return !isolated_.empty(); }

  /// Component label per vertex (labels ordered by smallest member).
  std::vector<Index> component_labels(std::size_t* n_components = nullptr) const;
  bool connected() const;

  /// Stable 64-bit fingerprint of structure and weights.
  std::uint64_t hash() const;

  /// Same graph with w_V multiplied by `scale`.
  WeightedGraph with_scaled_vertex_weights(double scale) const;

 private:
  std::size_t n_;
  double epsilon_;
  std::vector<Edge> edges_;
  std::vector<double> w_V_;
  std::vector<double> w_E_;
  GraphKind kind_;
  int manifold_dim_;
  std::vector<Index> offsets_;
  std::vector<Index> adjacency_;
  std::vector<Index> edge_of_slot_;
  std::vector<Index> isolated_;
};

/// All pairs i < j at distance < eps (strict), sorted lexicographically.
std::vector<Edge> build_edges(const PointCloud& cloud, DistanceMetric metric, double eps,
                              unsigned threads = 1);
/// Fixed-radius search on raw coordinates (rows of equal length).
std::vector<Edge> build_edges(const std::vector<std::vector<double>>& coords, double eps,
                              unsigned threads = 1);

/// n (n - 1) omega_m eps^m, the common normalizer of Definition 2.3.
double graph_normalizer(std::size_t n, int m, double eps);

WeightedGraph gamma_m_eps(const PointCloud& cloud, double eps, double total_volume,
                          DistanceMetric metric = DistanceMetric::embedded, unsigned threads = 1);
WeightedGraph gamma_N_eps(const PointCloud& cloud, double eps,
                          DistanceMetric metric = DistanceMetric::embedded, unsigned threads = 1);
WeightedGraph gamma_m_from_edges(std::size_t n, int m, double eps, double total_volume,
                                 std::vector<Edge> edges);
WeightedGraph gamma_N_from_edges(std::size_t n, int m, double eps, std::vector<Edge> edges);

/// (Delta_Gamma phi)(x) = 2 / (w_V(x) eps^2) * sum_{xy in E} (phi(x) - phi(y)) w_E(xy).
GraphFunction laplacian_apply(const WeightedGraph& g, const GraphFunction& phi);

/// L_n = 2 eps^{-2} (I - D^{-1} A) with zero-diagonal 0/1 adjacency A.
class RandomWalkMatrix {
 public:
  RandomWalkMatrix(std::size_t n, double eps, const std::vector<Edge>& edges);

  std::size_t size() const noexcept { return degree_.size(); }
  double epsilon() const noexcept { return eps_; }
  GraphFunction apply(const GraphFunction& phi) const;
  Eigen::MatrixXd to_dense() const;
  const std::vector<Index>& degrees() const noexcept { return degree_; }

 private:
  double eps_;
  std::vector<Index> degree_;
  std::vector<Index> offsets_;
  std::vector<Index> adjacency_;
};

RandomWalkMatrix random_walk_matrix(const PointCloud& cloud, double eps,
                                    DistanceMetric metric = DistanceMetric::embedded);

/// Hop counts from `source` (-1 when unreachable). Search stops after `max_hops` if >= 0.
std::vector<int> bfs_hops(const WeightedGraph& g, Index source, int max_hops = -1);

/// Hop count times eps; kInfiniteDistance when disconnected.
double graph_distance(const WeightedGraph& g, Index i, Index j);
/// B(i, r) = {j : d_Gamma(i, j) < r}, ascending.
std::vector<Index> ball(const WeightedGraph& g, Index i, double r);
double graph_volume(const WeightedGraph& g, std::span<const Index> subset);
double graph_volume(const WeightedGraph& g);

/// sum_x sum_{y ~ x} ((phi(x) - phi(y)) / eps)^2 w_E(xy); every edge counted twice.
double dirichlet_energy(const WeightedGraph& g, const GraphFunction& phi);
/// <phi, psi>_{vol_Gamma}
double inner_product(const WeightedGraph& g, const GraphFunction& phi, const GraphFunction& psi);

void write_edges_csv(std::ostream& os, const WeightedGraph& g);
void write_vertices_csv(std::ostream& os, const WeightedGraph& g);

}  // namespace spectral_limits
