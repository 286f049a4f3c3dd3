#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spectral_limits/graph.hpp"
#include "spectral_limits/sampling.hpp"

namespace spectral_limits {

using ManifoldFunction = std::function<double(const Point&)>;

/// psi_eps(d) = (1 - (d/eps)^2) / 2 for d <= eps, else 0.
double psi_eps(double dist, double eps);

/// Data points and scale for the interpolation map. psi uses the geodesic distance.
class KernelContext {
 public:
  KernelContext(const PointCloud& cloud, double eps);

  const PointCloud& cloud() const noexcept { return *cloud_; }
  double eps() const noexcept { return eps_; }

  /// Kernel weights psi_eps(d_g(x, x_i)) / (n - 1) of all data points with d_g < eps.
  std::vector<std::pair<Index, double>> weights(const Point& x) const;

  /// Caches theta_{n,eps} at the given query points (read-only afterwards).
  void cache(const std::vector<Point>& queries);
  const std::vector<double>& cached_theta() const noexcept { return theta_cache_; }

 private:
  const PointCloud* cloud_;
  double eps_;
  std::vector<double> theta_cache_;
};

/// (1/(n-1)) sum_{i=1}^n psi_eps(d_g(x, x_i)); the sum includes x itself if x is a data point.
double theta_n_eps(const KernelContext& ctx, const Point& x);

/// int_M psi_eps(d_g(x, y)) rho(y) dvol(y). Radial quadrature on the circle, sphere and
/// flat torus (eps below half the shortest period); Monte-Carlo with `n_mc` samples otherwise.
double theta_eps(const ManifoldModel& mfd, const DensitySpec& dens, const Point& x, double eps,
                 std::size_t n_mc = 200000, std::uint64_t seed = 0);

/// m omega_m int_0^eps psi_eps(r) sn_K(r)^{m-1} dr.
double theta_K_eps(int m, double K, double eps);

/// Lambda_eps phi (x); throws DomainError when theta_{n,eps}(x) = 0.
double interpolate(const KernelContext& ctx, const GraphFunction& phi, const Point& x);

/// f restricted to the data points.
GraphFunction discretize(const ManifoldFunction& f, const PointCloud& cloud);

/// A smooth function with its squared gradient norm |grad f|^2.
struct TestFunction {
  std::string name;
  ManifoldFunction f;
  ManifoldFunction grad_sq;
};

/// circle cos(theta), sphere cos(a_1) (the last coordinate over the radius), torus
/// cos(2 pi x_1 / p_1), spindle cos(theta).
TestFunction standard_test_function(const ManifoldModel& mfd);

struct EnergyComparison {
  double discrete = 0.0;
  double continuous = 0.0;
  double difference = 0.0;
  double continuous_std_error = 0.0;
};

/// (a) (1/(n(n-1) omega_m eps^m)) sum_i sum_{j in B~(x_i, eps)} ((f(x_i) - f(x_j))/eps)^2
/// (b) (1/(m+2)) int |grad f|^2 rho^2 dvol, (c) (a) - (b).
EnergyComparison energy_comparison_report(const ManifoldModel& mfd, const DensitySpec& dens,
                                          const PointCloud& cloud, double eps,
                                          const TestFunction& f);

struct L2Comparison {
  double discrete_mean = 0.0;       // (1/n) sum f(x_i)^2
  double discrete_mean_std_error = 0.0;
  double continuous_mean = 0.0;     // int f^2 rho dvol
  double discrete_degree = 0.0;     // sum f(x_i)^2 deg(x_i) / (n(n-1) omega_m eps^m)
  double continuous_degree = 0.0;   // int f^2 rho^2 dvol
};

L2Comparison l2_norm_comparison_report(const ManifoldModel& mfd, const DensitySpec& dens,
                                       const PointCloud& cloud, double eps,
                                       const ManifoldFunction& f);

/// RMS of theta_{n,eps}(x) - theta_eps(x) over `n_query` uniform points.
double theta_rms_deviation(const KernelContext& ctx, const DensitySpec& dens, std::size_t n_query,
                           std::uint64_t seed);

}  // namespace spectral_limits
