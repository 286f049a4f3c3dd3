#include <algorithm>
#include <cmath>
#include <numbers>

#include "spectral_limits/errors.hpp"
#include "spectral_limits/geometry.hpp"
#include "spectral_limits/quadrature.hpp"

namespace spectral_limits {

namespace {

constexpr double kPi = std::numbers::pi;

// int_{a0}^{a1} int_{b0}^{b1} g(a, b) db da. The outer integrand can be pure round-off when
// the inner integrals cancel, so its tolerance is floored by the coarse L1 norm of g.
template <class G>
double nested(const G& g, double a0, double a1, double b0, double b1, double tol) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  const double l1 = GK::integrate(
      [&](double a) { return GK::integrate([&](double b) { return std::abs(g(a, b)); }, b0, b1, 0, 0.0); }, a0,
      a1, 0, 0.0);
  return integrate(
      [&](double a) { return integrate([&](double b) { return g(a, b); }, b0, b1, tol); }, a0, a1, tol,
      tol * l1);
}

}  // namespace

double integrate_over(const ManifoldModel& mfd, const std::function<double(const Point&)>& f,
                      Xoshiro256* rng, std::size_t n_mc, double* stderr_out, double tolerance) {
  if (stderr_out != nullptr) *stderr_out = 0.0;
  const int m = mfd.dim();
  switch (mfd.kind()) {
    case ManifoldKind::circle: {
      const double R = mfd.radius();
      return R * integrate([&](double t) { return f(mfd.make_point({t})); }, 0.0, 2.0 * kPi,
                           tolerance);
    }
    case ManifoldKind::sphere:
      if (m == 1) {
        const double R = mfd.radius();
        return R * integrate([&](double t) { return f(mfd.make_point({t})); }, 0.0, 2.0 * kPi,
                             tolerance);
      }
      if (m == 2) {
        const double R2 = mfd.radius() * mfd.radius();
        return R2 * nested(
                        [&](double t, double p) {
                          return f(mfd.make_point({t, p})) * std::sin(t);
                        },
                        0.0, kPi, 0.0, 2.0 * kPi, tolerance);
      }
      break;
    case ManifoldKind::flat_torus: {
      const auto& per = mfd.periods();
      if (m == 1) {
        return integrate([&](double x) { return f(mfd.make_point({x})); }, 0.0, per[0], tolerance);
      }
      if (m == 2) {
        return nested([&](double x, double y) { return f(mfd.make_point({x, y})); }, 0.0, per[0],
                      0.0, per[1], tolerance);
      }
      break;
    }
    case ManifoldKind::spindle:
      if (m == 2) {
        const double c = mfd.warp();
        return c * nested(
                       [&](double t, double p) {
                         return f(mfd.make_point({t, p})) * std::sin(t);
                       },
                       0.0, kPi, 0.0, 2.0 * kPi, tolerance);
      }
      break;
  }
  if (rng == nullptr) {
    throw DomainError("integrate_over: " + mfd.tag() +
                      " needs Monte-Carlo integration; pass an RNG");
  }
  double sum = 0.0;
  double sum2 = 0.0;
  for (std::size_t i = 0; i < n_mc; ++i) {
    const double v = f(mfd.sample_uniform(*rng));
    sum += v;
    sum2 += v * v;
  }
  const double n = static_cast<double>(n_mc);
  const double mean = sum / n;
  const double var = std::max(sum2 / n - mean * mean, 0.0);
  if (stderr_out != nullptr) *stderr_out = mfd.total_volume() * std::sqrt(var / n);
  return mfd.total_volume() * mean;
}

}  // namespace spectral_limits
