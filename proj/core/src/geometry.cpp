#include "spectral_limits/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/ellint_2.hpp>

#include "spectral_limits/errors.hpp"
#include "spectral_limits/quadrature.hpp"

namespace spectral_limits {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  return w;
}

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

double euclidean(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

std::vector<double> random_unit_vector(Xoshiro256& rng, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  double norm = 0.0;
  do {
    norm = 0.0;
    for (auto& x : v) {
      x = rng.normal();
      norm += x * x;
    }
  } while (norm < 1e-300);
  norm = std::sqrt(norm);
  for (auto& x : v) x /= norm;
  return v;
}

// Great-circle distance on the unit sphere between colatitudes t1, t2 with
// longitude difference lambda in [0, pi].
double round_distance(double t1, double t2, double lambda) {
  const double c = std::cos(t1) * std::cos(t2) + std::sin(t1) * std::sin(t2) * std::cos(lambda);
  // haversine form keeps precision for nearby points
  const double s1 = std::sin(0.5 * (t1 - t2));
  const double s2 = std::sin(0.5 * lambda);
  const double h = s1 * s1 + std::sin(t1) * std::sin(t2) * s2 * s2;
  if (c > 0.5) return 2.0 * std::asin(std::sqrt(std::clamp(h, 0.0, 1.0)));
  return std::acos(clamp_unit(c));
}

// The metric dtheta^2 + c^2 sin^2(theta) ds^2 is locally the unit round sphere with
// longitude c*s, so minimizing geodesics are great-circle arcs in the developed
// sphere (longitude change <= pi) or broken paths through one of the two tips.
double spindle_distance(double t1, double t2, double fiber_angle, double c) {
  double best = std::min(t1 + t2, 2.0 * kPi - t1 - t2);
  for (double turn : {fiber_angle, kTwoPi - fiber_angle}) {
    const double lambda = c * turn;
    if (lambda <= kPi) best = std::min(best, round_distance(t1, t2, lambda));
  }
  return best;
}

double spindle_embedded_gap(double t1, double t2, double fiber_angle, double c) {
  const double df = spindle_profile(t1, c) - spindle_profile(t2, c);
  const double s1 = std::sin(t1);
  const double s2 = std::sin(t2);
  const double fiber = c * c * (s1 * s1 + s2 * s2 - 2.0 * s1 * s2 * std::cos(fiber_angle));
  return std::sqrt(df * df + std::max(fiber, 0.0));
}

double spindle_fiber_angle(const ManifoldModel& mfd, const Point& x, const Point& y) {
  const auto fx = std::span<const double>(x.intrinsic).subspan(1);
  const auto fy = std::span<const double>(y.intrinsic).subspan(1);
  if (mfd.dim() == 2) {
    const double d = std::fabs(wrap_angle(fx[0]) - wrap_angle(fy[0]));
    return std::min(d, kTwoPi - d);
  }
  const auto ux = sphere_embed(fx);
  const auto uy = sphere_embed(fy);
  double dot = 0.0;
  for (std::size_t i = 0; i < ux.size(); ++i) dot += ux[i] * uy[i];
  return std::acos(clamp_unit(dot));
}

// Area of the disk of radius r intersected with [-a, a] x [-b, b].
double disk_rectangle_area(double r, double a, double b) {
  if (r <= std::min(a, b)) return kPi * r * r;
  // int_0^x 2 sqrt(r^2 - t^2) dt
  auto cap = [r](double x) {
    return x * std::sqrt(std::max(r * r - x * x, 0.0)) + r * r * std::asin(std::min(x / r, 1.0));
  };
  const double xmax = std::min(r, a);
  if (r > b) {
    const double kink = std::sqrt(r * r - b * b);
    if (kink >= xmax) return 4.0 * b * xmax;
    return 2.0 * (2.0 * b * kink + cap(xmax) - cap(kink));
  }
  return 2.0 * cap(xmax);
}

void require_point(const ManifoldModel& mfd, const Point& p) {
  if (static_cast<int>(p.intrinsic.size()) != mfd.intrinsic_dim() ||
      static_cast<int>(p.embedded.size()) != mfd.embedding_dim()) {
    throw DomainError("point does not belong to manifold " + mfd.tag());
  }
}

}  // namespace

void ModelParams::validate() const {
  if (m < 1) throw DomainError("ModelParams: m must be >= 1");
  if (K < 1.0) throw DomainError("ModelParams: K must be >= 1");
  if (D < 1.0) throw DomainError("ModelParams: D must be >= 1");
  if (!(v > 0.0 && v < 1.0)) throw DomainError("ModelParams: v must lie in (0, 1)");
}

std::string to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::circle: return "circle";
    case ManifoldKind::sphere: return "sphere";
    case ManifoldKind::flat_torus: return "flat_torus";
    case ManifoldKind::spindle: return "spindle";
  }
  return "unknown";
}

ManifoldKind manifold_kind_from_string(const std::string& name) {
  if (name == "circle") return ManifoldKind::circle;
  if (name == "sphere") return ManifoldKind::sphere;
  if (name == "flat_torus" || name == "torus") return ManifoldKind::flat_torus;
  if (name == "spindle") return ManifoldKind::spindle;
  throw ConfigError("unknown manifold kind '" + name + "'");
}

std::vector<double> sphere_embed(std::span<const double> angles) {
  const std::size_t k = angles.size();
  if (k == 0) throw DomainError("sphere_embed: need at least one angle");
  if (k == 1) return {std::cos(angles[0]), std::sin(angles[0])};
  auto inner = sphere_embed(angles.subspan(1));
  const double s = std::sin(angles[0]);
  for (auto& v : inner) v *= s;
  inner.push_back(std::cos(angles[0]));
  return inner;
}

std::vector<double> sphere_angles(std::span<const double> u) {
  const std::size_t n = u.size();
  if (n < 2) throw DomainError("sphere_angles: need at least two coordinates");
  if (n == 2) return {wrap_angle(std::atan2(u[1], u[0]))};
  double rho = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) rho += u[i] * u[i];
  rho = std::sqrt(rho);
  std::vector<double> out{std::atan2(rho, u[n - 1])};
  std::vector<double> rest(u.begin(), u.end() - 1);
  if (rho > 0.0) {
    for (auto& v : rest) v /= rho;
  } else {
    std::fill(rest.begin(), rest.end(), 0.0);
    rest[0] = 1.0;
  }
  const auto tail = sphere_angles(rest);
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

double spindle_profile(double theta, double c) {
  using boost::math::ellint_2;
  return ellint_2(c) - ellint_2(c, 0.5 * kPi - theta);
}

ManifoldModel ManifoldModel::circle(double radius) {
  if (!(radius > 0.0)) throw DomainError("circle radius must be positive");
  ManifoldModel mfd;
  mfd.kind_ = ManifoldKind::circle;
  mfd.m_ = 1;
  mfd.d_ = 2;
  mfd.radius_ = radius;
  mfd.L_ = 0.5 * kPi;
  mfd.volume_ = kTwoPi * radius;
  return mfd;
}

ManifoldModel ManifoldModel::sphere(int m, double radius) {
  if (m < 1) throw DomainError("sphere dimension must be >= 1");
  if (!(radius > 0.0)) throw DomainError("sphere radius must be positive");
  ManifoldModel mfd;
  mfd.kind_ = ManifoldKind::sphere;
  mfd.m_ = m;
  mfd.d_ = m + 1;
  mfd.radius_ = radius;
  mfd.L_ = 0.5 * kPi;
  mfd.volume_ = unit_sphere_area(m) * std::pow(radius, m);
  return mfd;
}

ManifoldModel ManifoldModel::flat_torus(std::vector<double> periods) {
  if (periods.empty()) throw DomainError("flat torus needs at least one period");
  for (double p : periods) {
    if (!(p > 0.0)) throw DomainError("flat torus periods must be positive");
  }
  ManifoldModel mfd;
  mfd.kind_ = ManifoldKind::flat_torus;
  mfd.m_ = static_cast<int>(periods.size());
  mfd.d_ = 2 * mfd.m_;
  mfd.volume_ = 1.0;
  for (double p : periods) mfd.volume_ *= p;
  mfd.periods_ = std::move(periods);
  // each circle factor has arc <= (pi/2) chord
  mfd.L_ = 0.5 * kPi;
  return mfd;
}

ManifoldModel ManifoldModel::spindle(int m, double c) {
  if (m < 2) throw DomainError("spindle dimension must be >= 2");
  if (!(c > 0.0 && c <= 1.0)) throw DomainError("spindle warp c must lie in (0, 1]");
  ManifoldModel mfd;
  mfd.kind_ = ManifoldKind::spindle;
  mfd.m_ = m;
  mfd.d_ = m + 1;
  mfd.radius_ = c;
  const double profile = integrate([m](double t) { return std::pow(std::sin(t), m - 1); }, 0.0, kPi);
  mfd.volume_ = unit_sphere_area(m - 1) * std::pow(c, m - 1) * profile;

  // No closed form for L; take the grid maximum of d_g / d_emb with a safety margin.
  constexpr int kTheta = 72;
  constexpr int kFiber = 36;
  std::vector<double> thetas;
  for (int i = 0; i <= kTheta; ++i) thetas.push_back(kPi * i / kTheta);
  for (double t : {1e-3, 1e-2, 3e-2}) {
    thetas.push_back(t);
    thetas.push_back(kPi - t);
  }
  double ratio = 1.0;
  for (double t1 : thetas) {
    for (double t2 : thetas) {
      for (int j = 0; j <= kFiber; ++j) {
        const double fa = kPi * j / kFiber;
        const double emb = spindle_embedded_gap(t1, t2, fa, c);
        if (emb < 1e-9) continue;
        ratio = std::max(ratio, spindle_distance(t1, t2, fa, c) / emb);
      }
    }
  }
  mfd.L_ = 1.02 * ratio;
  return mfd;
}

std::string ManifoldModel::tag() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case ManifoldKind::circle: os << "circle(radius=" << radius_ << ")"; break;
    case ManifoldKind::sphere: os << "sphere(m=" << m_ << ",radius=" << radius_ << ")"; break;
    case ManifoldKind::flat_torus:
      os << "flat_torus(periods=";
      for (std::size_t i = 0; i < periods_.size(); ++i) os << (i ? ";" : "") << periods_[i];
      os << ")";
      break;
    case ManifoldKind::spindle: os << "spindle(m=" << m_ << ",c=" << radius_ << ")"; break;
  }
  return os.str();
}

double ManifoldModel::diameter() const noexcept {
  switch (kind_) {
    case ManifoldKind::circle:
    case ManifoldKind::sphere: return kPi * radius_;
    case ManifoldKind::flat_torus: {
      double s = 0.0;
      for (double p : periods_) s += 0.25 * p * p;
      return std::sqrt(s);
    }
    case ManifoldKind::spindle: return kPi;
  }
  return 0.0;
}

bool ManifoldModel::operator==(const ManifoldModel& other) const {
  return kind_ == other.kind_ && m_ == other.m_ && radius_ == other.radius_ &&
         periods_ == other.periods_;
}

Point ManifoldModel::make_point(std::vector<double> intrinsic) const {
  if (static_cast<int>(intrinsic.size()) != m_) {
    throw DomainError("make_point: expected " + std::to_string(m_) + " intrinsic coordinates for " +
                      tag());
  }
  Point p;
  switch (kind_) {
    case ManifoldKind::circle:
      p.embedded = {radius_ * std::cos(intrinsic[0]), radius_ * std::sin(intrinsic[0])};
      break;
    case ManifoldKind::sphere:
      p.embedded = sphere_embed(intrinsic);
      for (auto& v : p.embedded) v *= radius_;
      break;
    case ManifoldKind::flat_torus:
      p.embedded.reserve(static_cast<std::size_t>(d_));
      for (std::size_t i = 0; i < periods_.size(); ++i) {
        const double scale = periods_[i] / kTwoPi;
        const double a = kTwoPi * intrinsic[i] / periods_[i];
        p.embedded.push_back(scale * std::cos(a));
        p.embedded.push_back(scale * std::sin(a));
      }
      break;
    case ManifoldKind::spindle: {
      const double theta = intrinsic[0];
      if (theta < 0.0 || theta > kPi) throw DomainError("spindle theta must lie in [0, pi]");
      auto u = sphere_embed(std::span<const double>(intrinsic).subspan(1));
      p.embedded.reserve(static_cast<std::size_t>(d_));
      p.embedded.push_back(spindle_profile(theta, radius_));
      const double r = radius_ * std::sin(theta);
      for (double v : u) p.embedded.push_back(r * v);
      break;
    }
  }
  p.intrinsic = std::move(intrinsic);
  return p;
}

Point ManifoldModel::sample_uniform(Xoshiro256& rng) const {
  switch (kind_) {
    case ManifoldKind::circle: return make_point({rng.uniform(0.0, kTwoPi)});
    case ManifoldKind::sphere: {
      const auto u = random_unit_vector(rng, m_ + 1);
      return make_point(sphere_angles(u));
    }
    case ManifoldKind::flat_torus: {
      std::vector<double> x;
      for (double p : periods_) x.push_back(rng.uniform(0.0, p));
      return make_point(std::move(x));
    }
    case ManifoldKind::spindle: {
      double theta = 0.0;
      do {
        theta = rng.uniform(0.0, kPi);
      } while (rng.uniform() >= std::pow(std::sin(theta), m_ - 1));
      std::vector<double> coords{theta};
      const auto u = random_unit_vector(rng, m_);
      const auto fiber = sphere_angles(u);
      coords.insert(coords.end(), fiber.begin(), fiber.end());
      return make_point(std::move(coords));
    }
  }
  throw DomainError("unknown manifold kind");
}

double model_sn(double K, double r) {
  if (r < 0.0) throw DomainError("model_sn: r must be nonnegative");
  if (K < 0.0) throw DomainError("model_sn: K must be nonnegative");
  if (K == 0.0) return r;
  const double s = std::sqrt(K);
  return std::sinh(s * r) / s;
}

double model_ball_volume(int m, double K, double r) {
  if (m < 1) throw DomainError("model_ball_volume: m must be >= 1");
  if (r < 0.0) throw DomainError("model_ball_volume: r must be nonnegative");
  if (r == 0.0) return 0.0;
  if (m == 1) return 2.0 * r;
  const double area = unit_sphere_area(m - 1);
  return area * integrate([&](double t) { return std::pow(model_sn(K, t), m - 1); }, 0.0, r);
}

double unit_ball_volume(int m) {
  if (m < 0) throw DomainError("unit_ball_volume: m must be >= 0");
  return std::pow(kPi, 0.5 * m) / std::tgamma(0.5 * m + 1.0);
}

double unit_sphere_area(int k) {
  if (k < 0) throw DomainError("unit_sphere_area: k must be >= 0");
  return (k + 1) * unit_ball_volume(k + 1);
}

double geodesic_distance(const ManifoldModel& mfd, const Point& x, const Point& y) {
  require_point(mfd, x);
  require_point(mfd, y);
  switch (mfd.kind()) {
    case ManifoldKind::circle: {
      const double d = std::fabs(wrap_angle(x.intrinsic[0]) - wrap_angle(y.intrinsic[0]));
      return mfd.radius() * std::min(d, kTwoPi - d);
    }
    case ManifoldKind::sphere: {
      const double R = mfd.radius();
      const double chord = euclidean(x.embedded, y.embedded);
      return 2.0 * R * std::asin(std::min(1.0, 0.5 * chord / R));
    }
    case ManifoldKind::flat_torus: {
      double s = 0.0;
      const auto& per = mfd.periods();
      for (std::size_t i = 0; i < per.size(); ++i) {
        double d = std::fmod(std::fabs(x.intrinsic[i] - y.intrinsic[i]), per[i]);
        d = std::min(d, per[i] - d);
        s += d * d;
      }
      return std::sqrt(s);
    }
    case ManifoldKind::spindle:
      return spindle_distance(x.intrinsic[0], y.intrinsic[0], spindle_fiber_angle(mfd, x, y),
                              mfd.warp());
  }
  throw DomainError("unknown manifold kind");
}

double embedding_distance(const ManifoldModel& mfd, const Point& x, const Point& y) {
  require_point(mfd, x);
  require_point(mfd, y);
  return euclidean(x.embedded, y.embedded);
}

BallVolume ball_volume(const ManifoldModel& mfd, const Point& x, double r, Xoshiro256* rng,
                       std::size_t n_mc) {
  if (r < 0.0) throw DomainError("ball_volume: r must be nonnegative");
  if (r == 0.0) return {0.0, 0.0, true};
  switch (mfd.kind()) {
    case ManifoldKind::circle:
      return {std::min(2.0 * r, mfd.total_volume()), 0.0, true};
    case ManifoldKind::sphere: {
      const double R = mfd.radius();
      const double rr = std::min(r, kPi * R);
      const int m = mfd.dim();
      if (m == 1) return {2.0 * rr, 0.0, true};
      if (m == 2) return {kTwoPi * R * R * (1.0 - std::cos(rr / R)), 0.0, true};
      const double v = unit_sphere_area(m - 1) *
                       integrate([&](double t) { return std::pow(R * std::sin(t / R), m - 1); },
                                 0.0, rr);
      return {v, 0.0, true};
    }
    case ManifoldKind::flat_torus: {
      const auto& per = mfd.periods();
      if (per.size() == 1) return {std::min(2.0 * r, per[0]), 0.0, true};
      if (per.size() == 2) {
        return {disk_rectangle_area(r, 0.5 * per[0], 0.5 * per[1]), 0.0, true};
      }
      break;
    }
    case ManifoldKind::spindle: break;
  }
  if (rng == nullptr) {
    throw DomainError("ball_volume: no closed form for " + mfd.tag() +
                      "; a Monte-Carlo RNG is required");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n_mc; ++i) {
    const Point y = mfd.sample_uniform(*rng);
    if (geodesic_distance(mfd, x, y) < r) ++hits;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(n_mc);
  const double vol = mfd.total_volume();
  return {vol * p, vol * std::sqrt(p * (1.0 - p) / static_cast<double>(n_mc)), false};
}

double bishop_gromov_ratio(const ManifoldModel& mfd, const Point& x, double r, double K,
                           Xoshiro256* rng) {
  if (!(r > 0.0)) throw DomainError("bishop_gromov_ratio: r must be positive");
  return ball_volume(mfd, x, r, rng).value / model_ball_volume(mfd.dim(), K, r);
}

}  // namespace spectral_limits
