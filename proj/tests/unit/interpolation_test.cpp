#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "spectral_limits/errors.hpp"
#include "spectral_limits/experiment.hpp"
#include "spectral_limits/interpolation.hpp"

using namespace spectral_limits;
using std::numbers::pi;

namespace {

PointCloud two_point_circle() {
  const auto circle = ManifoldModel::circle(1.0);
  PointCloud cloud{{circle.make_point({0.0}), circle.make_point({pi})}, circle, DensitySpec::uniform(), 0};
  return cloud;
}

double cos_theta(const Point& p) { return std::cos(p.intrinsic[0]); }

}  // namespace

TEST(PsiEps, Values) {
  EXPECT_EQ(psi_eps(0.0, 0.3), 0.5);
  EXPECT_EQ(psi_eps(0.3, 0.3), 0.0);
  EXPECT_EQ(psi_eps(0.5, 0.3), 0.0);
  EXPECT_NEAR(psi_eps(0.15, 0.3), 0.375, 1e-15);
  EXPECT_THROW(psi_eps(-0.1, 0.3), DomainError);
}

TEST(ThetaNEps, KnownValues) {
  const auto cloud = two_point_circle();
  const KernelContext ctx(cloud, 0.4);
  const auto& mfd = cloud.manifold;
  EXPECT_NEAR(theta_n_eps(ctx, mfd.make_point({0.2})), 0.375, 1e-15);
  EXPECT_EQ(theta_n_eps(ctx, mfd.make_point({pi / 2})), 0.0);
  EXPECT_NEAR(theta_n_eps(ctx, cloud.points[0]), 0.5, 1e-15);

  const auto big = sample_dataset(mfd, DensitySpec::uniform(), 50, 1);
  const KernelContext ctx50(big, 0.3);
  for (const auto& p : big.points) EXPECT_GE(theta_n_eps(ctx50, p), 0.5 / 49.0);
}

TEST(ThetaEps, CircleClosedForm) {
  const auto circle = ManifoldModel::circle(1.0);
  for (double eps : {0.05, 0.3, 1.0, 2.0}) {
    EXPECT_NEAR(theta_eps(circle, DensitySpec::uniform(), circle.make_point({0.7}), eps), eps / (3.0 * pi), 1e-12);
  }
  EXPECT_LT(theta_eps(circle, DensitySpec::uniform(), circle.make_point({0.7}), 1e-8), 1e-8);
}

TEST(ThetaEps, SphereClosedForm) {
  const auto sphere = ManifoldModel::sphere(2, 1.0);
  for (double eps : {0.1, 0.5, 1.2}) {
    // int_0^eps r^2 sin r dr = -eps^2 cos eps + 2 eps sin eps + 2 cos eps - 2
    const double r2sin = -eps * eps * std::cos(eps) + 2.0 * eps * std::sin(eps) + 2.0 * std::cos(eps) - 2.0;
    const double expected = 0.25 * ((1.0 - std::cos(eps)) - r2sin / (eps * eps));
    EXPECT_NEAR(theta_eps(sphere, DensitySpec::uniform(), sphere.make_point({1.0, 2.0}), eps), expected, 1e-12);
  }
}

TEST(ThetaEps, TorusQuadratureMatchesMonteCarloPath) {
  // eps beyond half the shortest period switches to Monte-Carlo; both agree near the switch.
  const auto torus = ManifoldModel::flat_torus({1.0, 1.0});
  const auto x = torus.make_point({0.1, 0.9});
  const double quad = theta_eps(torus, DensitySpec::uniform(), x, 0.5);
  EXPECT_NEAR(quad, pi * 0.25 / 4.0, 1e-12);
  const double mc = theta_eps(torus, DensitySpec::uniform(), x, 0.5000001, 400000, 3);
  EXPECT_NEAR(mc, quad, 0.02 * quad);
}

TEST(ThetaKEps, ClosedForms) {
  for (double K : {0.0, 1.0, 5.0}) EXPECT_NEAR(theta_K_eps(1, K, 0.4), 2.0 * 0.4 / 3.0, 1e-14);
  const double eps = 0.5;
  // int_0^eps r^2 sinh r dr = eps^2 cosh eps - 2 eps sinh eps + 2 cosh eps - 2
  const double r2sinh = eps * eps * std::cosh(eps) - 2.0 * eps * std::sinh(eps) + 2.0 * std::cosh(eps) - 2.0;
  const double expected = pi * ((std::cosh(eps) - 1.0) - r2sinh / (eps * eps));
  EXPECT_NEAR(theta_K_eps(2, 1.0, eps), expected, 1e-10);
  EXPECT_LT(theta_K_eps(2, 1.0, 1e-6), 1e-11);
  for (int m = 1; m <= 4; ++m) {
    const double euclid = unit_ball_volume(m) * std::pow(eps, m) / (m + 2.0);
    EXPECT_NEAR(theta_K_eps(m, 1e-9, eps), euclid, 1e-8 * euclid) << m;
  }
}

TEST(Interpolate, PartitionOfUnityAndRange) {
  const auto sphere = ManifoldModel::sphere();
  const auto cloud = sample_dataset(sphere, DensitySpec::uniform(), 400, 2);
  const KernelContext ctx(cloud, 0.4);
  Xoshiro256 rng(5);
  Eigen::VectorXd phi(400);
  Eigen::VectorXd psi(400);
  for (int i = 0; i < 400; ++i) {
    phi[i] = rng.normal();
    psi[i] = rng.normal();
  }
  for (int t = 0; t < 100; ++t) {
    const auto x = sphere.sample_uniform(rng);
    if (theta_n_eps(ctx, x) == 0.0) continue;
    double total = 0.0;
    const double theta = theta_n_eps(ctx, x);
    for (const auto& [i, w] : ctx.weights(x)) total += w / theta;
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_NEAR(interpolate(ctx, Eigen::VectorXd::Constant(400, -2.5), x), -2.5, 1e-12);
    const double v = interpolate(ctx, phi, x);
    EXPECT_GE(v, phi.minCoeff() - 1e-12);
    EXPECT_LE(v, phi.maxCoeff() + 1e-12);
    EXPECT_NEAR(interpolate(ctx, 2.0 * phi - 3.0 * psi, x), 2.0 * v - 3.0 * interpolate(ctx, psi, x), 1e-11);
  }
}

TEST(Interpolate, SinglePointInRangeAndOutOfSupport) {
  const auto cloud = two_point_circle();
  const KernelContext ctx(cloud, 0.4);
  Eigen::VectorXd phi(2);
  phi << 7.0, -1.0;
  EXPECT_NEAR(interpolate(ctx, phi, cloud.manifold.make_point({0.3})), 7.0, 1e-15);
  EXPECT_THROW(interpolate(ctx, phi, cloud.manifold.make_point({pi / 2})), DomainError);
}

TEST(Discretize, Examples) {
  const auto circle = ManifoldModel::circle();
  const PointCloud cloud{{circle.make_point({0.0}), circle.make_point({pi / 2}), circle.make_point({pi})},
                         circle, DensitySpec::uniform(), 0};
  const auto v = discretize(cos_theta, cloud);
  EXPECT_NEAR(v[0], 1.0, 1e-15);
  EXPECT_NEAR(v[1], 0.0, 1e-15);
  EXPECT_NEAR(v[2], -1.0, 1e-15);
  EXPECT_EQ(discretize([](const Point&) { return 1.0; }, cloud), Eigen::VectorXd::Ones(3));
  const auto sin_theta = [](const Point& p) { return std::sin(p.intrinsic[0]); };
  const auto combo = discretize([&](const Point& p) { return 2.0 * cos_theta(p) - sin_theta(p); }, cloud);
  EXPECT_LT((combo - (2.0 * v - discretize(sin_theta, cloud))).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(EnergyComparison, ConstantFunction) {
  const auto circle = ManifoldModel::circle();
  const auto cloud = sample_dataset(circle, DensitySpec::uniform(), 300, 1);
  const TestFunction one{"one", [](const Point&) { return 1.0; }, [](const Point&) { return 0.0; }};
  const auto e = energy_comparison_report(circle, DensitySpec::uniform(), cloud, 0.2, one);
  EXPECT_EQ(e.discrete, 0.0);
  EXPECT_EQ(e.continuous, 0.0);
}

TEST(EnergyComparison, CircleCosine) {
  const auto circle = ManifoldModel::circle();
  const auto f = standard_test_function(circle);
  std::vector<double> diff1000;
  std::vector<double> diff4000;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    for (std::size_t n : {1000UL, 4000UL}) {
      const auto cloud = sample_dataset(circle, DensitySpec::uniform(), n, seed);
      const auto e = energy_comparison_report(circle, DensitySpec::uniform(), cloud, epsilon_schedule(n, 1), f);
      EXPECT_NEAR(e.continuous, 1.0 / (12.0 * pi), 1e-9);
      if (n == 4000) {
        EXPECT_NEAR(e.discrete, e.continuous, 0.25 * e.continuous);
      }
      (n == 1000 ? diff1000 : diff4000).push_back(std::fabs(e.difference));
    }
  }
  EXPECT_LE(median(diff4000), median(diff1000));
}

TEST(L2Comparison, CircleCosine) {
  const auto circle = ManifoldModel::circle();
  const auto cloud = sample_dataset(circle, DensitySpec::uniform(), 4000, 3);
  const auto r = l2_norm_comparison_report(circle, DensitySpec::uniform(), cloud, epsilon_schedule(4000, 1), cos_theta);
  EXPECT_NEAR(r.continuous_mean, 0.5, 1e-9);
  EXPECT_NEAR(r.discrete_mean, 0.5, 3.0 * r.discrete_mean_std_error);
  EXPECT_NEAR(r.continuous_degree, 1.0 / (4.0 * pi), 1e-9);
  EXPECT_NEAR(r.continuous_degree, 0.07958, 1e-5);
  EXPECT_NEAR(r.discrete_degree, r.continuous_degree, 0.1 * r.continuous_degree);
  const auto one = l2_norm_comparison_report(circle, DensitySpec::uniform(), cloud, 0.1, [](const Point&) { return 1.0; });
  EXPECT_NEAR(one.discrete_mean, 1.0, 1e-14);
}

TEST(ThetaDeviation, ShrinksWithN) {
  const auto circle = ManifoldModel::circle();
  std::vector<double> small;
  std::vector<double> large;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto a = sample_dataset(circle, DensitySpec::uniform(), 500, seed);
    const auto b = sample_dataset(circle, DensitySpec::uniform(), 4000, seed);
    small.push_back(theta_rms_deviation(KernelContext(a, 0.3), DensitySpec::uniform(), 200, seed));
    large.push_back(theta_rms_deviation(KernelContext(b, 0.3), DensitySpec::uniform(), 200, seed));
  }
  EXPECT_LT(median(large), median(small));
}

TEST(StandardTestFunction, GradientsMatchFiniteDifferences) {
  const auto circle = ManifoldModel::circle(2.0);
  const auto f = standard_test_function(circle);
  const double h = 1e-6;
  const double t = 0.9;
  const double dfdt = (f.f(circle.make_point({t + h})) - f.f(circle.make_point({t - h}))) / (2.0 * h);
  EXPECT_NEAR(f.grad_sq(circle.make_point({t})), dfdt * dfdt / 4.0, 1e-7);
}
