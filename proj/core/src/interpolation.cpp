#include "spectral_limits/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spectral_limits/errors.hpp"
#include "spectral_limits/quadrature.hpp"

namespace spectral_limits {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

double psi_eps(double dist, double eps) {
  if (dist < 0.0) throw DomainError("psi_eps: distance must be nonnegative");
  if (!(eps > 0.0)) throw DomainError("psi_eps: eps must be positive");
  if (dist > eps) return 0.0;
  const double q = dist / eps;
  return 0.5 * (1.0 - q * q);
}

KernelContext::KernelContext(const PointCloud& cloud, double eps) : cloud_(&cloud), eps_(eps) {
  if (!(eps > 0.0)) throw DomainError("KernelContext: eps must be positive");
  if (cloud.n() < 2) throw DomainError("KernelContext: need at least two data points");
}

std::vector<std::pair<Index, double>> KernelContext::weights(const Point& x) const {
  std::vector<std::pair<Index, double>> out;
  const double inv = 1.0 / static_cast<double>(cloud_->n() - 1);
  for (Index i = 0; i < cloud_->n(); ++i) {
    const double w = psi_eps(geodesic_distance(cloud_->manifold, x, cloud_->points[i]), eps_);
    if (w > 0.0) out.emplace_back(i, w * inv);
  }
  return out;
}

void KernelContext::cache(const std::vector<Point>& queries) {
  theta_cache_.clear();
  theta_cache_.reserve(queries.size());
  for (const auto& q : queries) theta_cache_.push_back(theta_n_eps(*this, q));
}

double theta_n_eps(const KernelContext& ctx, const Point& x) {
  double s = 0.0;
  for (const auto& [i, w] : ctx.weights(x)) s += w;
  return s;
}

double theta_eps(const ManifoldModel& mfd, const DensitySpec& dens, const Point& x, double eps,
                 std::size_t n_mc, std::uint64_t seed) {
  if (!(eps > 0.0)) throw DomainError("theta_eps: eps must be positive");
  auto psi = [eps](double r) { return psi_eps(r, eps); };
  switch (mfd.kind()) {
    case ManifoldKind::circle: {
      const double R = mfd.radius();
      const double reach = std::min(eps, kPi * R);
      const double t0 = x.intrinsic[0];
      auto integrand = [&](double s) { return psi(std::fabs(s)) * dens(mfd, mfd.make_point({t0 + s / R})); };
      return integrate(integrand, -reach, 0.0) + integrate(integrand, 0.0, reach);
    }
    case ManifoldKind::sphere:
      if (dens.kind == DensityKind::uniform) {
        const double R = mfd.radius();
        const int m = mfd.dim();
        const double reach = std::min(eps, kPi * R);
        const double v = integrate([&](double r) { return psi(r) * std::pow(R * std::sin(r / R), m - 1); },
                                   0.0, reach);
        return unit_sphere_area(m - 1) * v / mfd.total_volume();
      }
      break;
    case ManifoldKind::flat_torus: {
      const auto& per = mfd.periods();
      if (dens.kind == DensityKind::uniform && eps <= 0.5 * *std::min_element(per.begin(), per.end())) {
        const int m = mfd.dim();
        const double v = integrate([&](double r) { return psi(r) * std::pow(r, m - 1); }, 0.0, eps);
        return m * unit_ball_volume(m) * v / mfd.total_volume();
      }
      break;
    }
    case ManifoldKind::spindle: break;
  }
  Xoshiro256 rng(seed);
  double sum = 0.0;
  for (std::size_t i = 0; i < n_mc; ++i) {
    const Point y = mfd.sample_uniform(rng);
    sum += psi(geodesic_distance(mfd, x, y)) * dens(mfd, y);
  }
  return mfd.total_volume() * sum / static_cast<double>(n_mc);
}

double theta_K_eps(int m, double K, double eps) {
  if (m < 1) throw DomainError("theta_K_eps: m must be >= 1");
  if (!(eps > 0.0)) throw DomainError("theta_K_eps: eps must be positive");
  const double v = integrate(
      [&](double r) { return psi_eps(r, eps) * std::pow(model_sn(K, r), m - 1); }, 0.0, eps);
  return m * unit_ball_volume(m) * v;
}

double interpolate(const KernelContext& ctx, const GraphFunction& phi, const Point& x) {
  if (static_cast<std::size_t>(phi.size()) != ctx.cloud().n()) {
    throw DomainError("interpolate: graph function size does not match the data set");
  }
  double num = 0.0;
  double theta = 0.0;
  for (const auto& [i, w] : ctx.weights(x)) {
    num += w * phi[i];
    theta += w;
  }
  if (!(theta > 0.0)) {
    throw DomainError("interpolate: query point lies outside the support of theta_{n,eps}");
  }
  return num / theta;
}

GraphFunction discretize(const ManifoldFunction& f, const PointCloud& cloud) {
  GraphFunction out(static_cast<Eigen::Index>(cloud.n()));
  for (std::size_t i = 0; i < cloud.n(); ++i) out[static_cast<Eigen::Index>(i)] = f(cloud.points[i]);
  return out;
}

TestFunction standard_test_function(const ManifoldModel& mfd) {
  switch (mfd.kind()) {
    case ManifoldKind::circle: {
      const double R = mfd.radius();
      return {"cos_theta", [](const Point& p) { return std::cos(p.intrinsic[0]); },
              [R](const Point& p) {
                const double s = std::sin(p.intrinsic[0]) / R;
                return s * s;
              }};
    }
    case ManifoldKind::sphere: {
      const double R = mfd.radius();
      return {"last_coordinate", [](const Point& p) { return std::cos(p.intrinsic[0]); },
              [R](const Point& p) {
                const double s = std::sin(p.intrinsic[0]) / R;
                return s * s;
              }};
    }
    case ManifoldKind::flat_torus: {
      const double k = 2.0 * kPi / mfd.periods()[0];
      return {"cos_first_period", [k](const Point& p) { return std::cos(k * p.intrinsic[0]); },
              [k](const Point& p) {
                const double s = k * std::sin(k * p.intrinsic[0]);
                return s * s;
              }};
    }
    case ManifoldKind::spindle:
      return {"cos_theta", [](const Point& p) { return std::cos(p.intrinsic[0]); },
              [](const Point& p) {
                const double s = std::sin(p.intrinsic[0]);
                return s * s;
              }};
  }
  throw DomainError("unknown manifold kind");
}

EnergyComparison energy_comparison_report(const ManifoldModel& mfd, const DensitySpec& dens,
                                          const PointCloud& cloud, double eps,
                                          const TestFunction& f) {
  const auto g = gamma_N_eps(cloud, eps);
  EnergyComparison out;
  // Gamma^N has w_E = 1/(n(n-1) omega_m eps^m) and counts every ordered pair once
  out.discrete = dirichlet_energy(g, discretize(f.f, cloud));
  Xoshiro256 rng(derive_seed(cloud.seed, 0xe1e1));
  double se = 0.0;
  const double integral = integrate_over(
      mfd, [&](const Point& p) { const double r = dens(mfd, p); return f.grad_sq(p) * r * r; }, &rng,
      200000, &se);
  const int m = mfd.dim();
  out.continuous = integral / (m + 2);
  out.continuous_std_error = se / (m + 2);
  out.difference = out.discrete - out.continuous;
  return out;
}

L2Comparison l2_norm_comparison_report(const ManifoldModel& mfd, const DensitySpec& dens,
                                       const PointCloud& cloud, double eps,
                                       const ManifoldFunction& f) {
  L2Comparison out;
  const auto n = static_cast<double>(cloud.n());
  double s = 0.0;
  double s2 = 0.0;
  for (const auto& p : cloud.points) {
    const double v = f(p) * f(p);
    s += v;
    s2 += v * v;
  }
  out.discrete_mean = s / n;
  out.discrete_mean_std_error = std::sqrt(std::max(s2 / n - out.discrete_mean * out.discrete_mean, 0.0) / n);
  const auto edges = build_edges(cloud, DistanceMetric::embedded, eps);
  std::vector<double> deg(cloud.n(), 0.0);
  for (const auto& [i, j] : edges) {
    deg[i] += 1.0;
    deg[j] += 1.0;
  }
  double sd = 0.0;
  for (std::size_t i = 0; i < cloud.n(); ++i) sd += f(cloud.points[i]) * f(cloud.points[i]) * deg[i];
  out.discrete_degree = sd / graph_normalizer(cloud.n(), mfd.dim(), eps);
  Xoshiro256 rng(derive_seed(cloud.seed, 0x12));
  out.continuous_mean = integrate_over(
      mfd, [&](const Point& p) { return f(p) * f(p) * dens(mfd, p); }, &rng);
  out.continuous_degree = integrate_over(
      mfd, [&](const Point& p) { const double r = dens(mfd, p); return f(p) * f(p) * r * r; }, &rng);
  return out;
}

double theta_rms_deviation(const KernelContext& ctx, const DensitySpec& dens, std::size_t n_query,
                           std::uint64_t seed) {
  const auto& mfd = ctx.cloud().manifold;
  Xoshiro256 rng(seed);
  double s = 0.0;
  for (std::size_t q = 0; q < n_query; ++q) {
    const Point x = mfd.sample_uniform(rng);
    const double d = theta_n_eps(ctx, x) - theta_eps(mfd, dens, x, ctx.eps(), 20000, derive_seed(seed, q + 1));
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(n_query));
}

}  // namespace spectral_limits
