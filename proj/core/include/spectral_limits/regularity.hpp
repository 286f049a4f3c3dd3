#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "spectral_limits/graph.hpp"
#include "spectral_limits/spectral.hpp"

namespace spectral_limits {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// ||phi||_{p,W} = ((1/vol W) sum_{x in W} |phi(x)|^p w_V(x))^{1/p}; sup over W when p = inf.
double weighted_p_norm(const WeightedGraph& g, const GraphFunction& phi, double p,
                       std::span<const Index> subset);
double weighted_p_norm(const WeightedGraph& g, const GraphFunction& phi, double p);

/// ||grad phi||_{2,W}^2 = (1/vol W) sum_{x in W} sum_{y in W, xy in E} ((phi(x)-phi(y))/eps)^2 w_E.
/// Only edges with both endpoints in W count.
double gradient_norm(const WeightedGraph& g, const GraphFunction& phi,
                     std::span<const Index> subset);
double gradient_norm(const WeightedGraph& g, const GraphFunction& phi);

/// phi_s(x): vol_Gamma-average of phi over B(x, s).
GraphFunction ball_average(const WeightedGraph& g, const GraphFunction& phi, double s);

/// Which vertices serve as ball centers.
struct CenterSample {
  /// Unset: every vertex when n <= exhaustive_limit, otherwise `default_count` random ones.
  std::optional<std::size_t> count;
  std::uint64_t seed = 0;
  std::size_t exhaustive_limit = 2000;
  std::size_t default_count = 200;

  std::vector<Index> select(std::size_t n) const;
};

struct DoublingResult {
  double Q = 1.0;
  Index worst_center = 0;
  double worst_radius = 0.0;
  std::vector<Index> centers;
};

/// sup over centers and r > eps of vol B(x, 2r) / vol B(x, r). Because d_Gamma is
/// eps-quantized, r in ((k+1/2) eps, (k+1) eps] attains the supremum for each k >= 1.
DoublingResult doubling_constant(const WeightedGraph& g, const CenterSample& centers = {});

struct PoincareOptions {
  double sigma = 1.0;
  CenterSample centers;
  /// sigma r-balls with more vertices are evaluated on test functions only.
  std::size_t max_exact_ball = 2000;
  /// Global Laplacian eigenvectors used as test functions (computed if absent).
  const SpectralResult* test_functions = nullptr;
  int n_test_functions = 12;
};

struct PoincareResult {
  /// max(1, sharp): certificates require P >= 1.
  double P = 1.0;
  double sharp = 0.0;
  double sigma = 1.0;
  bool approximate = false;
  bool infinite = false;
  std::size_t balls_evaluated = 0;
  std::size_t balls_approximate = 0;
  Index worst_center = 0;
  double worst_radius = 0.0;
  std::vector<double> radii;
  std::vector<Index> centers;
};

/// Sharp ratio for one ball: sup over phi on B(x, sigma r) of
/// ||phi - phi_B||_{2,B} / (r ||grad phi||_{2, sigma B}). +inf when B meets two
/// components of the positively weighted sigma-ball subgraph.
double poincare_ball_ratio(const WeightedGraph& g, Index center, double r, double sigma);

PoincareResult poincare_constant(const WeightedGraph& g, const PoincareOptions& opts = {});

/// max over xy, xz in E of w_V(x)/w_V(y), deg(x)/deg(y), w_E(xy)/w_E(xz).
double almost_regularity(const WeightedGraph& g);

/// I phi(x) = sum_{xy} w_E(xy) phi(y) / sum_{xy} w_E(xy).
GraphFunction smoothing_apply(const WeightedGraph& g, const GraphFunction& phi);

struct NashDiagnostic {
  double C = 0.0;
  bool infinite = false;
  double lhs = 0.0;
  double l1 = 0.0;
  double gradient = 0.0;
};

/// Smallest C >= 0 with min{||phi||_2, ||I phi||_2} <=
/// (C (D ||grad phi||_2)^{nu/(nu+2)} + ||phi||_1^{nu/(nu+2)}) ||phi||_1^{2/(nu+2)}.
NashDiagnostic nash_diagnostic(const WeightedGraph& g, const GraphFunction& phi, double D, double nu);

/// alpha = max_x w_V(x) / sum_{xy} w_E(xy).
double moser_alpha(const WeightedGraph& g);

/// Hop diameter times eps: exact (all-pairs BFS) up to `exact_limit` vertices,
/// otherwise the largest eccentricity over a double sweep from sampled centers.
double graph_diameter(const WeightedGraph& g, std::size_t exact_limit = 2000);

struct MoserCheck {
  double ratio = 1.0;
  double bound_shape = 1.0;
  double lambda = 0.0;
  double normalized() const noexcept { return ratio / bound_shape; }
};

/// ratio = || |phi_k| ||_p / || |phi_k| ||_1; bound_shape = p^{2 lambda alpha eps^2} e^{D sqrt(lambda)}
/// with lambda = max(lambda_k, 1) and the unknown constant C set to 1.
MoserCheck moser_check(const WeightedGraph& g, const SpectralResult& spectral, int k, double p,
                       double alpha_param, double D);

struct MoserRow {
  int k = 0;
  double p = 1.0;
  double ratio = 1.0;
  double bound_shape = 1.0;
};

struct RegularityOptions {
  double sigma = 1.0;
  CenterSample centers;
  std::size_t max_exact_ball = 2000;
  int k_max = 5;
  std::vector<double> moser_p{2.0, 4.0, 8.0, kInfinity};
};

struct RegularityCertificate {
  std::size_t n = 0;
  double eps = 0.0;
  double Q = 1.0;
  double nu = 0.0;
  double P = 1.0;
  double P_sharp = 0.0;
  double sigma = 1.0;
  double R = 1.0;
  bool poincare_approximate = false;
  bool poincare_infinite = false;
  double diameter = 0.0;
  double alpha = 0.0;
  std::vector<double> sampled_radii;
  std::vector<Index> sampled_centers;
  std::vector<MoserRow> moser_table;

  /// max over k = 1..k_max of the Moser ratio at exponent p (1 when absent).
  double moser_max(double p) const;
};

RegularityCertificate certify_regularity(const WeightedGraph& g, const SpectralResult& spectral,
                                         const RegularityOptions& opts = {});

/// Header and one row: n, eps, Q, P, sigma, R, moser ratios at p in {2, 4, 8, inf}.
void write_certificate_header(std::ostream& os);
void write_certificate_row(std::ostream& os, const RegularityCertificate& cert);

}  // namespace spectral_limits
