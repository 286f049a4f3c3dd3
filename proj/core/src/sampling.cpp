#include "spectral_limits/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "spectral_limits/errors.hpp"
#include "spectral_limits/report_io.hpp"

namespace spectral_limits {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double periodic_angle(double t) {
  double w = std::fmod(t, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  return w;
}

double table_value(const std::vector<double>& table, double theta) {
  const auto n = table.size();
  const double pos = periodic_angle(theta) / kTwoPi * static_cast<double>(n);
  const auto j = std::min(static_cast<std::size_t>(pos), n - 1);
  const double frac = pos - static_cast<double>(j);
  return (1.0 - frac) * table[j] + frac * table[(j + 1) % n];
}

void require_circle(const ManifoldModel& mfd, const char* what) {
  if (mfd.kind() != ManifoldKind::circle) {
    throw ConfigError(std::string(what) + " densities are only defined on the circle, not " +
                      mfd.tag());
  }
}

// Inverse CDF of rho(theta) = (1 + a cos theta) / (2 pi R) in the angle variable.
double cosine_tilt_quantile(double a, double u) {
  const double target = kTwoPi * u;
  auto fn = [&](double t) {
    return std::make_pair(t + a * std::sin(t) - target, 1.0 + a * std::cos(t));
  };
  std::uintmax_t iters = 64;
  return boost::math::tools::newton_raphson_iterate(fn, target, 0.0, kTwoPi, 52, iters);
}

}  // namespace

std::string to_string(DensityKind kind) {
  switch (kind) {
    case DensityKind::uniform: return "uniform";
    case DensityKind::cosine_tilt: return "cosine_tilt";
    case DensityKind::custom_1d: return "custom_1d";
  }
  return "unknown";
}

DensitySpec DensitySpec::uniform() { return DensitySpec{}; }

DensitySpec DensitySpec::cosine_tilt(const ManifoldModel& mfd, double amplitude) {
  require_circle(mfd, "cosine_tilt");
  if (!(amplitude >= 0.0 && amplitude <= 0.5)) {
    throw ConfigError("cosine_tilt amplitude must lie in [0, 0.5]");
  }
  const double R = mfd.radius();
  DensitySpec d;
  d.kind = DensityKind::cosine_tilt;
  d.amplitude = amplitude;
  d.alpha = (1.0 + amplitude) / (1.0 - amplitude);
  d.lipschitz = amplitude / (kTwoPi * R * R);
  d.hessian_log_bound = amplitude / ((1.0 - amplitude) * R * R);
  return d;
}

DensitySpec DensitySpec::custom_1d(const ManifoldModel& mfd, std::vector<double> table) {
  require_circle(mfd, "custom_1d");
  if (table.size() < 3) throw ConfigError("custom_1d table needs at least 3 values");
  for (double v : table) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("custom_1d values must be positive");
  }
  const double R = mfd.radius();
  const auto n = table.size();
  const double h = kTwoPi * R / static_cast<double>(n);
  DensitySpec d;
  d.kind = DensityKind::custom_1d;
  const auto [lo, hi] = std::minmax_element(table.begin(), table.end());
  d.alpha = *hi / *lo;
  for (std::size_t j = 0; j < n; ++j) {
    const double prev = table[(j + n - 1) % n];
    const double next = table[(j + 1) % n];
    d.lipschitz = std::max(d.lipschitz, std::fabs(next - table[j]) / h);
    const double second = std::log(next) - 2.0 * std::log(table[j]) + std::log(prev);
    d.hessian_log_bound = std::max(d.hessian_log_bound, std::fabs(second) / (h * h));
  }
  d.table = std::move(table);
  return d;
}

double DensitySpec::operator()(const ManifoldModel& mfd, const Point& x) const {
  switch (kind) {
    case DensityKind::uniform: return 1.0 / mfd.total_volume();
    case DensityKind::cosine_tilt:
      return (1.0 + amplitude * std::cos(x.intrinsic[0])) / mfd.total_volume();
    case DensityKind::custom_1d: return table_value(table, x.intrinsic[0]);
  }
  return 0.0;
}

double DensitySpec::max_value(const ManifoldModel& mfd) const {
  switch (kind) {
    case DensityKind::uniform: return 1.0 / mfd.total_volume();
    case DensityKind::cosine_tilt: return (1.0 + amplitude) / mfd.total_volume();
    case DensityKind::custom_1d: return *std::max_element(table.begin(), table.end());
  }
  return 0.0;
}

void DensitySpec::validate(const ManifoldModel& mfd) const {
  if (kind != DensityKind::uniform) require_circle(mfd, to_string(kind).c_str());
  double mass = 1.0;
  switch (kind) {
    case DensityKind::uniform: break;
    case DensityKind::cosine_tilt:
      mass = integrate_over(mfd, [&](const Point& p) { return (*this)(mfd, p); });
      break;
    case DensityKind::custom_1d: {
      // trapezoid rule is exact for the periodic piecewise-linear interpolant
      double s = 0.0;
      for (double v : table) s += v;
      mass = s * kTwoPi * mfd.radius() / static_cast<double>(table.size());
      break;
    }
  }
  if (std::fabs(mass - 1.0) > 1e-6) {
    std::ostringstream os;
    os.precision(12);
    os << "density " << describe() << " integrates to " << mass << ", expected 1";
    throw ConfigError(os.str());
  }
  if (kind == DensityKind::uniform) return;
  constexpr int kGrid = 8192;
  double lo = 1e300;
  double hi = 0.0;
  for (int j = 0; j < kGrid; ++j) {
    const double v = (*this)(mfd, mfd.make_point({kTwoPi * j / kGrid}));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(lo > 0.0) || hi / lo > alpha * (1.0 + 1e-12)) {
    throw ConfigError("density " + describe() + " violates max/min <= alpha");
  }
}

std::string DensitySpec::describe() const {
  std::string s = to_string(kind);
  if (kind == DensityKind::cosine_tilt) {
    s += "(a0=";
    append_number(s, amplitude);
    s += ")";
  } else if (kind == DensityKind::custom_1d) {
    s += "(" + std::to_string(table.size()) + " values)";
  }
  return s;
}

PointCloud sample_dataset(const ManifoldModel& mfd, const DensitySpec& dens, std::size_t n,
                          std::uint64_t seed) {
  if (n < 2) throw DomainError("sample_dataset: n must be >= 2");
  if (mfd.kind() == ManifoldKind::spindle && dens.kind != DensityKind::uniform) {
    throw ConfigError("only the uniform density is supported on the spindle");
  }
  Xoshiro256 rng(seed);
  PointCloud cloud{{}, mfd, dens, seed};
  cloud.points.reserve(n);
  switch (dens.kind) {
    case DensityKind::uniform:
      for (std::size_t i = 0; i < n; ++i) cloud.points.push_back(mfd.sample_uniform(rng));
      break;
    case DensityKind::cosine_tilt:
      require_circle(mfd, "cosine_tilt");
      for (std::size_t i = 0; i < n; ++i) {
        cloud.points.push_back(mfd.make_point({cosine_tilt_quantile(dens.amplitude, rng.uniform())}));
      }
      break;
    case DensityKind::custom_1d: {
      // rejection against the uniform measure scaled by max rho
      const double envelope = dens.max_value(mfd);
      const double expected_acceptance = 1.0 / (mfd.total_volume() * envelope);
      if (expected_acceptance < 1e-3) {
        throw ConfigError("rejection sampling acceptance below 1e-3 for " + dens.describe());
      }
      std::size_t proposals = 0;
      while (cloud.points.size() < n) {
        Point p = mfd.sample_uniform(rng);
        ++proposals;
        if (rng.uniform() * envelope < dens(mfd, p)) cloud.points.push_back(std::move(p));
        if (proposals > 10000 && cloud.points.size() * 1000 < proposals) {
          throw ConfigError("rejection sampling acceptance below 1e-3 for " + dens.describe());
        }
      }
      break;
    }
  }
  return cloud;
}

double epsilon_schedule(std::size_t n, int m) {
  if (n < 3) throw DomainError("epsilon_schedule: n must be >= 3");
  if (m < 1) throw DomainError("epsilon_schedule: m must be >= 1");
  const double x = static_cast<double>(n);
  return std::pow(std::log(x) / x, 1.0 / (m + 2));
}

BernsteinBound bernstein_bound(double sup_norm, double sigma, std::size_t n, double delta) {
  if (sup_norm < 0.0 || sigma < 0.0 || delta < 0.0) {
    throw DomainError("bernstein_bound: inputs must be nonnegative");
  }
  return {2.0 * sup_norm * delta * delta + 4.0 * sigma * delta,
          2.0 * std::exp(-static_cast<double>(n) * delta * delta)};
}

BernsteinCheck bernstein_empirical_check(const ManifoldModel& mfd, const DensitySpec& dens,
                                         const std::function<double(const Point&)>& f,
                                         std::size_t n, double delta, std::size_t trials,
                                         std::uint64_t seed) {
  if (trials < 100) throw DomainError("bernstein_empirical_check: trials must be >= 100");
  BernsteinCheck out;
  out.trials = trials;

  Xoshiro256 aux(derive_seed(seed, 0xffffffffULL));
  const double first = integrate_over(
      mfd, [&](const Point& p) { return f(p) * dens(mfd, p); }, &aux);
  const double second = integrate_over(
      mfd, [&](const Point& p) { const double v = f(p); return v * v * dens(mfd, p); }, &aux);
  out.mean = first;
  out.sigma = std::sqrt(std::max(second - first * first, 0.0));
  // variance below quadrature noise is a constant function
  if (out.sigma < 1e-7 * std::max(1.0, std::fabs(first))) out.sigma = 0.0;
  for (int i = 0; i < 20000; ++i) out.sup_norm = std::max(out.sup_norm, std::fabs(f(mfd.sample_uniform(aux))));

  out.bound = bernstein_bound(out.sup_norm, out.sigma, n, delta);
  std::size_t violations = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const PointCloud cloud = sample_dataset(mfd, dens, n, derive_seed(seed, t));
    double s = 0.0;
    for (const auto& p : cloud.points) s += f(p);
    const double dev = std::fabs(s / static_cast<double>(n) - out.mean);
    if (out.sigma > 0.0 || out.sup_norm > 0.0) {
      if (dev >= out.bound.deviation && dev > 1e-12) ++violations;
    }
  }
  out.violation_rate = static_cast<double>(violations) / static_cast<double>(trials);
  out.contract_limit = out.bound.failure_prob +
                       3.0 * std::sqrt(out.bound.failure_prob / static_cast<double>(trials)) + 0.01;
  return out;
}

void write_point_cloud(std::ostream& os, const PointCloud& cloud) {
  std::string line = "# manifold=" + to_string(cloud.manifold.kind()) +
                     " n=" + std::to_string(cloud.n()) + " seed=" + std::to_string(cloud.seed) +
                     " d=" + std::to_string(cloud.manifold.embedding_dim()) + "\n";
  line += "# model=" + cloud.manifold.tag() + " density=" + cloud.density.describe() +
          " rng=" + cloud.rng_algorithm + "\n";
  os << line;
  for (const auto& p : cloud.points) {
    line.clear();
    bool first = true;
    for (const auto* coords : {&p.intrinsic, &p.embedded}) {
      for (double v : *coords) {
        if (!first) line += ',';
        append_number(line, v);
        first = false;
      }
    }
    line += '\n';
    os << line;
  }
}

PointCloud read_point_cloud(std::istream& is, const ManifoldModel& mfd, const DensitySpec& dens) {
  PointCloud cloud{{}, mfd, dens, 0};
  const auto mi = static_cast<std::size_t>(mfd.intrinsic_dim());
  const auto md = static_cast<std::size_t>(mfd.embedding_dim());
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("seed=");
      if (pos != std::string::npos) cloud.seed = std::stoull(line.substr(pos + 5));
      continue;
    }
    std::vector<double> values;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) values.push_back(std::stod(cell));
    if (values.size() != mi + md) {
      throw ConfigError("point cloud row has " + std::to_string(values.size()) +
                        " columns, expected " + std::to_string(mi + md));
    }
    Point p;
    p.intrinsic.assign(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mi));
    p.embedded.assign(values.begin() + static_cast<std::ptrdiff_t>(mi), values.end());
    cloud.points.push_back(std::move(p));
  }
  return cloud;
}

}  // namespace spectral_limits
