#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <queue>
#include <vector>

#include <gtest/gtest.h>

#include "spectral_limits/errors.hpp"
#include "spectral_limits/geometry.hpp"

using namespace spectral_limits;
using std::numbers::pi;

namespace {

std::vector<ManifoldModel> all_models() {
  return {ManifoldModel::circle(1.0), ManifoldModel::circle(2.0), ManifoldModel::sphere(2, 1.0),
          ManifoldModel::sphere(3, 1.5), ManifoldModel::flat_torus({1.0, 1.0}),
          ManifoldModel::flat_torus({1.0, 2.0, 0.5}), ManifoldModel::spindle(2),
          ManifoldModel::spindle(3)};
}

double simpson(const std::function<double(double)>& f, double a, double b, int intervals) {
  const double h = (b - a) / intervals;
  double s = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Dijkstra on a fine (theta, phi) grid of the m = 2 spindle metric dtheta^2 + c^2 sin^2(theta) dphi^2.
class SpindleGridOracle {
 public:
  SpindleGridOracle(double c, int n_theta, int n_phi) : c_(c), nt_(n_theta), np_(n_phi) {}

  double theta(int i) const { return pi * i / (nt_ - 1); }
  double phi(int j) const { return 2.0 * pi * j / np_; }

  std::vector<double> distances_from(int i0, int j0) const {
    const std::size_t size = static_cast<std::size_t>(nt_) * static_cast<std::size_t>(np_);
    std::vector<double> dist(size, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    const auto id = [&](int i, int j) { return static_cast<std::size_t>(i) * np_ + static_cast<std::size_t>(j); };
    dist[id(i0, j0)] = 0.0;
    pq.emplace(0.0, id(i0, j0));
    const double dt = pi / (nt_ - 1);
    const double dp = 2.0 * pi / np_;
    while (!pq.empty()) {
      const auto [d, v] = pq.top();
      pq.pop();
      if (d > dist[v]) continue;
      const int i = static_cast<int>(v / static_cast<std::size_t>(np_));
      const int j = static_cast<int>(v % static_cast<std::size_t>(np_));
      for (int di = -5; di <= 5; ++di) {
        for (int dj = -5; dj <= 5; ++dj) {
          if ((di == 0 && dj == 0) || std::gcd(std::abs(di), std::abs(dj)) != 1) continue;
          const int ii = i + di;
          if (ii < 0 || ii >= nt_) continue;
          const int jj = ((j + dj) % np_ + np_) % np_;
          const double mid = 0.5 * (theta(i) + theta(ii));
          const double fiber = c_ * std::sin(mid) * dj * dp;
          const double len = std::sqrt(di * dt * di * dt + fiber * fiber);
          if (d + len < dist[id(ii, jj)]) {
            dist[id(ii, jj)] = d + len;
            pq.emplace(d + len, id(ii, jj));
          }
        }
      }
    }
    return dist;
  }

 private:
  double c_;
  int nt_;
  int np_;
};

}  // namespace

TEST(ModelSn, HyperbolicValues) {
  EXPECT_NEAR(model_sn(1.0, 1.0), 1.1752011936438014, 1e-12);
  EXPECT_NEAR(model_sn(4.0, 0.5), std::sinh(1.0) / 2.0, 1e-12);
  EXPECT_NEAR(model_sn(4.0, 0.5), 0.58760, 1e-5);
  EXPECT_EQ(model_sn(1.0, 0.0), 0.0);
}

TEST(ModelBallVolume, ClosedForms) {
  EXPECT_EQ(model_ball_volume(2, 1.0, 0.0), 0.0);
  EXPECT_NEAR(model_ball_volume(2, 1.0, 0.5), 2.0 * pi * (std::cosh(0.5) - 1.0), 1e-10);
  EXPECT_NEAR(model_ball_volume(2, 1.0, 0.5), 0.801898, 1e-6);
  EXPECT_NEAR(model_ball_volume(1, 1.0, 0.3), 0.6, 1e-12);
}

TEST(ModelBallVolume, StrictlyIncreasing) {
  for (int m : {1, 2, 3, 4}) {
    double prev = model_ball_volume(m, 1.0, 0.0);
    for (int i = 1; i <= 60; ++i) {
      const double v = model_ball_volume(m, 1.0, 0.05 * i);
      EXPECT_GT(v, prev) << "m=" << m << " r=" << 0.05 * i;
      prev = v;
    }
  }
}

TEST(UnitBallVolume, LowDimensions) {
  EXPECT_NEAR(unit_ball_volume(1), 2.0, 1e-14);
  EXPECT_NEAR(unit_ball_volume(2), pi, 1e-14);
  EXPECT_NEAR(unit_ball_volume(3), 4.0 * pi / 3.0, 1e-14);
  EXPECT_NEAR(unit_ball_volume(3), 4.18879, 1e-5);
}

TEST(GeodesicDistance, KnownValues) {
  const auto torus = ManifoldModel::flat_torus({1.0, 1.0});
  EXPECT_NEAR(geodesic_distance(torus, torus.make_point({0.0, 0.0}), torus.make_point({0.6, 0.0})), 0.4, 1e-12);
  const auto circle = ManifoldModel::circle(1.0);
  EXPECT_NEAR(geodesic_distance(circle, circle.make_point({0.0}), circle.make_point({pi})), pi, 1e-12);
  const auto sphere = ManifoldModel::sphere(2, 1.0);
  EXPECT_NEAR(geodesic_distance(sphere, sphere.make_point({0.0, 0.0}), sphere.make_point({pi / 2, 1.0})), pi / 2,
              1e-12);
}

TEST(EmbeddingDistance, KnownValues) {
  const auto circle = ManifoldModel::circle(1.0);
  EXPECT_NEAR(embedding_distance(circle, circle.make_point({0.0}), circle.make_point({pi})), 2.0, 1e-12);
  for (const auto& mfd : all_models()) {
    Xoshiro256 rng(11);
    const auto x = mfd.sample_uniform(rng);
    EXPECT_EQ(embedding_distance(mfd, x, x), 0.0) << mfd.tag();
    EXPECT_EQ(geodesic_distance(mfd, x, x), 0.0) << mfd.tag();
  }
}

TEST(Spindle, ProfileMatchesQuadrature) {
  const double c = ManifoldModel::kSpindleWarp;
  const double oracle =
      simpson([&](double t) { return std::sqrt(1.0 - c * c * std::cos(t) * std::cos(t)); }, 0.0, pi / 2, 2000);
  EXPECT_NEAR(oracle, 1.35064, 1e-5);
  EXPECT_NEAR(spindle_profile(pi / 2, c), oracle, 1e-10);
  const auto spindle = ManifoldModel::spindle(2, c);
  EXPECT_NEAR(spindle.make_point({pi / 2, 0.3}).embedded[0], oracle, 1e-10);
}

TEST(Spindle, GeodesicMatchesGridDijkstra) {
  const double c = ManifoldModel::kSpindleWarp;
  const auto spindle = ManifoldModel::spindle(2, c);
  const SpindleGridOracle grid(c, 241, 480);
  Xoshiro256 rng(3);
  for (int src = 0; src < 3; ++src) {
    // stay away from the tips, where the polar grid is too anisotropic for the stencil
    const int i0 = 60 + static_cast<int>(rng.below(121));
    const int j0 = static_cast<int>(rng.below(480));
    const auto dist = grid.distances_from(i0, j0);
    const auto x = spindle.make_point({grid.theta(i0), grid.phi(j0)});
    for (int t = 0; t < 40; ++t) {
      const int i = 60 + static_cast<int>(rng.below(121));
      const int j = static_cast<int>(rng.below(480));
      const double oracle = dist[static_cast<std::size_t>(i) * 480 + static_cast<std::size_t>(j)];
      const double d = geodesic_distance(spindle, x, spindle.make_point({grid.theta(i), grid.phi(j)}));
      EXPECT_NEAR(d, oracle, 0.01 * oracle + 2e-3) << "theta " << grid.theta(i0) << "->" << grid.theta(i);
      EXPECT_LE(d, oracle + 1e-9);
    }
  }
}

TEST(BallVolume, ClosedForms) {
  const auto sphere = ManifoldModel::sphere(2, 1.0);
  const auto north = sphere.make_point({0.0, 0.0});
  EXPECT_NEAR(ball_volume(sphere, north, 0.5).value, 2.0 * pi * (1.0 - std::cos(0.5)), 1e-10);
  EXPECT_NEAR(ball_volume(sphere, north, 0.5).value, 0.769171, 1e-6);
  EXPECT_EQ(ball_volume(sphere, north, 0.0).value, 0.0);
  const auto torus = ManifoldModel::flat_torus({1.0, 1.0});
  EXPECT_NEAR(ball_volume(torus, torus.make_point({0.2, 0.7}), 0.3).value, pi * 0.09, 1e-12);
  EXPECT_NEAR(ball_volume(torus, torus.make_point({0.2, 0.7}), 0.3).value, 0.28274, 1e-5);
}

TEST(BishopGromov, KnownValues) {
  const auto sphere = ManifoldModel::sphere(2, 1.0);
  const auto x = sphere.make_point({0.4, 1.0});
  EXPECT_NEAR(bishop_gromov_ratio(sphere, x, 0.5, 1.0), 0.959189, 1e-6);
  EXPECT_NEAR(bishop_gromov_ratio(sphere, x, 0.5, 1.0),
              (1.0 - std::cos(0.5)) / (std::cosh(0.5) - 1.0), 1e-10);
  EXPECT_NEAR(bishop_gromov_ratio(sphere, x, 1e-4, 1.0), 1.0, 1e-6);
  const auto circle = ManifoldModel::circle(1.0);
  EXPECT_NEAR(bishop_gromov_ratio(circle, circle.make_point({1.0}), 0.1, 1.0), 1.0, 1e-12);
}

TEST(BishopGromov, MonotoneInRadius) {
  for (const auto& mfd : {ManifoldModel::circle(1.0), ManifoldModel::sphere(2, 1.0),
                          ManifoldModel::flat_torus({1.0, 1.0}), ManifoldModel::flat_torus({1.0, 0.6})}) {
    Xoshiro256 rng(5);
    for (int s = 0; s < 10; ++s) {
      const auto x = mfd.sample_uniform(rng);
      double prev = bishop_gromov_ratio(mfd, x, 0.01, 1.0);
      for (int i = 2; i <= 100; ++i) {
        const double r = 0.01 * i * mfd.diameter();
        const double v = bishop_gromov_ratio(mfd, x, r, 1.0);
        EXPECT_LE(v, prev + 1e-8) << mfd.tag() << " r=" << r;
        prev = v;
      }
    }
  }
}

TEST(Distances, EmbeddingClassBounds) {
  for (const auto& mfd : all_models()) {
    Xoshiro256 rng(17);
    const double L = mfd.embedding_constant();
    for (int t = 0; t < 1000; ++t) {
      const auto x = mfd.sample_uniform(rng);
      const auto y = mfd.sample_uniform(rng);
      const double de = embedding_distance(mfd, x, y);
      const double dg = geodesic_distance(mfd, x, y);
      EXPECT_LE(de, dg + 1e-12) << mfd.tag();
      EXPECT_LE(dg, L * de + 1e-12) << mfd.tag();
    }
  }
}

TEST(Distances, TriangleInequality) {
  for (const auto& mfd : all_models()) {
    Xoshiro256 rng(23);
    for (int t = 0; t < 1000; ++t) {
      const auto x = mfd.sample_uniform(rng);
      const auto y = mfd.sample_uniform(rng);
      const auto z = mfd.sample_uniform(rng);
      EXPECT_LE(geodesic_distance(mfd, x, z),
                geodesic_distance(mfd, x, y) + geodesic_distance(mfd, y, z) + 1e-10)
          << mfd.tag();
    }
  }
}

TEST(ManifoldModel, TotalVolumes) {
  EXPECT_NEAR(ManifoldModel::circle(2.0).total_volume(), 4.0 * pi, 1e-12);
  EXPECT_NEAR(ManifoldModel::sphere(2, 1.0).total_volume(), 4.0 * pi, 1e-12);
  EXPECT_NEAR(ManifoldModel::flat_torus({1.0, 2.0}).total_volume(), 2.0, 1e-12);
  const double c = ManifoldModel::kSpindleWarp;
  EXPECT_NEAR(ManifoldModel::spindle(2, c).total_volume(), 4.0 * pi * c, 1e-9);
  EXPECT_NEAR(ManifoldModel::spindle(3, c).total_volume(), 4.0 * pi * c * c * pi / 2.0, 1e-9);
}

TEST(ManifoldModel, RejectsBadInput) {
  EXPECT_THROW(ManifoldModel::circle(-1.0), DomainError);
  EXPECT_THROW(ManifoldModel::flat_torus({}), DomainError);
  EXPECT_THROW(ManifoldModel::circle(1.0).make_point({0.0, 1.0}), DomainError);
}

TEST(Integration, SphereArea) {
  const auto sphere = ManifoldModel::sphere(2, 1.0);
  EXPECT_NEAR(integrate_over(sphere, [](const Point&) { return 1.0; }), 4.0 * pi, 1e-8);
  EXPECT_NEAR(integrate_over(sphere, [](const Point& p) { return p.embedded[2] * p.embedded[2]; }), 4.0 * pi / 3.0,
              1e-8);
}
