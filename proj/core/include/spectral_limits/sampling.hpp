#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "spectral_limits/geometry.hpp"

namespace spectral_limits {

enum class DensityKind { uniform, cosine_tilt, custom_1d };

std::string to_string(DensityKind kind);

/// A density in P(M: alpha, Lip, H) with respect to vol_g.
///
/// cosine_tilt and custom_1d live on the circle only. custom_1d holds density
/// values on the uniform angle grid theta_j = 2 pi j / N, interpolated linearly
/// and periodically.
struct DensitySpec {
  DensityKind kind = DensityKind::uniform;
  double amplitude = 0.0;
  std::vector<double> table;
  double alpha = 1.0;
  double lipschitz = 0.0;
  double hessian_log_bound = 0.0;

  static DensitySpec uniform();
  static DensitySpec cosine_tilt(const ManifoldModel& mfd, double amplitude);
  static DensitySpec custom_1d(const ManifoldModel& mfd, std::vector<double> table);

  double operator()(const ManifoldModel& mfd, const Point& x) const;
  double max_value(const ManifoldModel& mfd) const;

  /// Throws ConfigError unless int rho dvol = 1 (1e-6) and max/min <= alpha on a grid.
  void validate(const ManifoldModel& mfd) const;

  std::string describe() const;
};

struct PointCloud {
  std::vector<Point> points;
  ManifoldModel manifold;
  DensitySpec density;
  std::uint64_t seed = 0;
  std::string rng_algorithm{kRngAlgorithm};

  std::size_t n() const noexcept { return points.size(); }
};

PointCloud sample_dataset(const ManifoldModel& mfd, const DensitySpec& dens, std::size_t n,
                          std::uint64_t seed);

/// (ln n / n)^{1/(m+2)}.
double epsilon_schedule(std::size_t n, int m);

struct BernsteinBound {
  double deviation = 0.0;
  double failure_prob = 0.0;
};

BernsteinBound bernstein_bound(double sup_norm, double sigma, std::size_t n, double delta);

struct BernsteinCheck {
  double violation_rate = 0.0;
  BernsteinBound bound;
  double mean = 0.0;
  double sigma = 0.0;
  double sup_norm = 0.0;
  std::size_t trials = 0;
  /// failure_prob + 3 sqrt(failure_prob / trials) + 0.01
  double contract_limit = 0.0;
  bool within_contract() const noexcept { return violation_rate <= contract_limit; }
};

/// Runs `trials` independent data sets of size n and counts how often the sample
/// mean of f leaves the Bernstein deviation band around int f rho dvol.
BernsteinCheck bernstein_empirical_check(const ManifoldModel& mfd, const DensitySpec& dens,
                                         const std::function<double(const Point&)>& f,
                                         std::size_t n, double delta, std::size_t trials,
                                         std::uint64_t seed);

void write_point_cloud(std::ostream& os, const PointCloud& cloud);
PointCloud read_point_cloud(std::istream& is, const ManifoldModel& mfd, const DensitySpec& dens);

}  // namespace spectral_limits
