#include "spectral_limits/reference.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <tuple>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/spherical_harmonic.hpp>
#include <boost/math/tools/minima.hpp>

#include "spectral_limits/errors.hpp"
#include "spectral_limits/lanczos.hpp"

namespace spectral_limits {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kShift = 1.0;

double wrap(double a, double period) {
  double r = std::fmod(a, period);
  if (r < 0.0) r += period;
  return r;
}

/// Real spherical harmonic on S^2 with unit mean square.
double real_sh(int l, int mm, double theta, double phi) {
  using boost::math::spherical_harmonic_i;
  using boost::math::spherical_harmonic_r;
  const auto L = static_cast<unsigned>(l);
  if (mm == 0) return std::sqrt(4.0 * kPi) * spherical_harmonic_r(L, 0, theta, phi);
  if (mm > 0) return std::sqrt(8.0 * kPi) * spherical_harmonic_r(L, mm, theta, phi);
  return std::sqrt(8.0 * kPi) * spherical_harmonic_i(L, -mm, theta, phi);
}

/// Unit-mean-square harmonic number `copy` of degree l on S^d, evaluated at the
/// unit vector `u` with chart angles `angles`.
bool harmonic_available(int d, int l) { return l <= 1 || d <= 2; }

double sphere_harmonic(int d, int l, int copy, const std::vector<double>& u,
                       const std::vector<double>& angles) {
  if (l == 0) return 1.0;
  if (l == 1) return std::sqrt(static_cast<double>(d + 1)) * u[static_cast<std::size_t>(copy)];
  if (d == 1) {
    const double phi = angles[0];
    return copy == 0 ? std::sqrt(2.0) * std::cos(l * phi) : std::sqrt(2.0) * std::sin(l * phi);
  }
  // d == 2: copies 0..2l map to orders -l..l
  return real_sh(l, copy - l, angles[0], angles[1]);
}

struct FdSolution {
  std::vector<double> values;
  Eigen::MatrixXd vectors;  // columns in original coordinates
};

/// Smallest eigenpairs of A f = lambda M f (A symmetric PSD, M positive diagonal) by
/// Lanczos on M^{1/2} (A + s M)^{-1} M^{1/2}.
FdSolution smallest_generalized(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& mass,
                                int count, double tol) {
  const Eigen::Index n = A.rows();
  Eigen::SparseMatrix<double> shifted = A;
  for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) += kShift * mass[i];
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(shifted);
  if (ldlt.info() != Eigen::Success) throw SolverError("finite-difference factorization failed");
  const Eigen::VectorXd sq = mass.cwiseSqrt();
  SymmetricOperator op = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    y = sq.cwiseProduct(ldlt.solve(sq.cwiseProduct(x)).eval());
  };
  LanczosOptions opts;
  opts.nev = count;
  opts.largest = true;
  opts.tol = tol;
  opts.norm_bound = 1.0 / kShift;
  opts.seed = 0xfd5eed;
  const auto res = lanczos(op, n, opts);
  if (!res.converged) throw SolverError("finite-difference eigensolver did not converge");
  FdSolution out;
  out.vectors.resize(n, count);
  for (int k = 0; k < count; ++k) {
    double lambda = 1.0 / res.values[k] - kShift;
    if (std::fabs(lambda) < 1e-9) lambda = 0.0;
    out.values.push_back(lambda);
    out.vectors.col(k) = res.vectors.col(k).cwiseQuotient(sq);
  }
  return out;
}

/// Solves on meshes N, N/2, N/4 and returns the Richardson-extrapolated values together
/// with the finest eigenvectors.
template <class Assemble>
FdSolution richardson_solve(Assemble assemble, int mesh, int count, double tol, ProvenanceInfo& info,
                            const std::string& what) {
  std::vector<FdSolution> sols;
  for (int level = 2; level >= 0; --level) {
    Eigen::SparseMatrix<double> A;
    Eigen::VectorXd M;
    assemble(mesh >> level, A, M);
    sols.push_back(smallest_generalized(A, M, count, tol));
  }
  FdSolution out = sols[2];
  for (int k = 0; k < count; ++k) {
    const double l4 = sols[0].values[k];
    const double l2 = sols[1].values[k];
    const double l1 = sols[2].values[k];
    const double floor = 1e-9 * std::max(1.0, std::fabs(l1));
    if (std::fabs(l2 - l1) <= floor || std::fabs(l4 - l2) <= floor) continue;
    const double ratio = (l4 - l2) / (l2 - l1);
    if (!(ratio >= 3.0 && ratio <= 5.0)) {
      std::ostringstream msg;
      msg << what << ": mesh sequence not converging at second order (Richardson ratio " << ratio
          << " for eigenvalue " << k << ", mesh " << mesh << ")";
      throw SolverError(msg.str());
    }
    if (info.richardson_min == 0.0 || ratio < info.richardson_min) info.richardson_min = ratio;
    info.richardson_max = std::max(info.richardson_max, ratio);
    out.values[k] = l1 + (l1 - l2) / 3.0;
  }
  return out;
}

/// Fixes the sign so the entry of largest magnitude is positive.
void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index i = 0;
  v.cwiseAbs().maxCoeff(&i);
  if (v[i] < 0.0) v = -v;
}

}  // namespace

std::string to_string(Provenance p) {
  return p == Provenance::closed_form ? "closed_form" : "sturm_liouville";
}

std::vector<double> ReferenceSpectrum::eigenvalues() const {
  std::vector<double> out;
  out.reserve(modes_.size());
  for (const auto& m : modes_) out.push_back(m.eigenvalue);
  return out;
}

std::vector<std::pair<int, int>> ReferenceSpectrum::clusters(double rel_tol) const {
  std::vector<std::pair<int, int>> out;
  for (int k = 0; k < static_cast<int>(modes_.size()); ++k) {
    const double v = modes_[static_cast<std::size_t>(k)].eigenvalue;
    if (!out.empty()) {
      const double prev = modes_[static_cast<std::size_t>(out.back().second)].eigenvalue;
      if (std::fabs(v - prev) <= rel_tol * std::max(1.0, std::fabs(v))) {
        out.back().second = k;
        continue;
      }
    }
    out.emplace_back(k, k);
  }
  return out;
}

std::vector<int> ReferenceSpectrum::multiplicities(double rel_tol) const {
  std::vector<int> out;
  for (const auto& [a, b] : clusters(rel_tol)) out.push_back(b - a + 1);
  return out;
}

void ReferenceSpectrum::finalize(int k_max) {
  std::stable_sort(modes_.begin(), modes_.end(), [](const ReferenceMode& a, const ReferenceMode& b) {
    return std::tie(a.eigenvalue, a.l, a.radial, a.copy) < std::tie(b.eigenvalue, b.l, b.radial, b.copy);
  });
  auto keep = static_cast<std::size_t>(k_max + 1);
  auto same = [](double a, double b) { return std::fabs(a - b) <= 1e-9 * std::max(1.0, std::fabs(b)); };
  while (keep > 0 && keep < modes_.size() && same(modes_[keep].eigenvalue, modes_[keep - 1].eigenvalue)) ++keep;
  if (modes_.size() > keep) modes_.resize(keep);
}

double sphere_harmonic_eigenvalue(int d, int l) { return static_cast<double>(l) * (l + d - 1); }

int sphere_harmonic_multiplicity(int d, int l) {
  using boost::math::binomial_coefficient;
  if (l == 0) return 1;
  const auto a = binomial_coefficient<double>(static_cast<unsigned>(l + d), static_cast<unsigned>(d));
  const double b = l >= 2 ? binomial_coefficient<double>(static_cast<unsigned>(l + d - 2),
                                                         static_cast<unsigned>(d))
                          : 0.0;
  return static_cast<int>(std::lround(a - b));
}

ReferenceSpectrum circle_spectrum(double radius, int k_max) {
  if (k_max < 0) throw DomainError("circle_spectrum: k_max must be >= 0");
  ReferenceSpectrum spec(ManifoldModel::circle(radius), DensitySpec::uniform());
  const int jmax = k_max / 2 + 1;
  for (int j = 0; j <= jmax; ++j) {
    const double lambda = (j / radius) * (j / radius);
    if (j == 0) {
      spec.modes().push_back({0.0, 0, 0, 0, [](const Point&) { return 1.0; }});
      continue;
    }
    spec.modes().push_back({lambda, j, 0, 0, [j](const Point& p) {
                              return std::sqrt(2.0) * std::cos(j * p.intrinsic[0]);
                            }});
    spec.modes().push_back({lambda, j, 0, 1, [j](const Point& p) {
                              return std::sqrt(2.0) * std::sin(j * p.intrinsic[0]);
                            }});
  }
  spec.finalize(k_max);
  return spec;
}

ReferenceSpectrum sphere_spectrum(int m, double radius, int k_max) {
  if (k_max < 0) throw DomainError("sphere_spectrum: k_max must be >= 0");
  ReferenceSpectrum spec(ManifoldModel::sphere(m, radius), DensitySpec::uniform());
  int total = 0;
  for (int l = 0; total <= k_max; ++l) {
    const double lambda = sphere_harmonic_eigenvalue(m, l) / (radius * radius);
    const int mult = sphere_harmonic_multiplicity(m, l);
    for (int c = 0; c < mult; ++c, ++total) {
      ReferenceMode mode{lambda, l, 0, c, {}};
      if (harmonic_available(m, l)) {
        mode.f = [m, l, c, radius](const Point& p) {
          std::vector<double> u(p.embedded);
          for (auto& v : u) v /= radius;
          const auto angles = l >= 2 ? sphere_angles(u) : std::vector<double>{};
          return sphere_harmonic(m, l, c, u, angles);
        };
      }
      spec.modes().push_back(std::move(mode));
    }
  }
  spec.finalize(k_max);
  return spec;
}

ReferenceSpectrum flat_torus_spectrum(const std::vector<double>& periods, int k_max) {
  if (k_max < 0) throw DomainError("flat_torus_spectrum: k_max must be >= 0");
  ReferenceSpectrum spec(ManifoldModel::flat_torus(periods), DensitySpec::uniform());
  const std::size_t d = periods.size();
  const double pmax = *std::max_element(periods.begin(), periods.end());
  for (int bound = 1;; ++bound) {
    // wave vectors with first nonzero component positive, |k_i| <= bound
    std::vector<std::pair<double, std::vector<int>>> waves;
    std::vector<int> k(d, -bound);
    for (;;) {
      auto first = std::find_if(k.begin(), k.end(), [](int v) { return v != 0; });
      if (first == k.end() || *first > 0) {
        double lambda = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
          const double w = kTwoPi * k[i] / periods[i];
          lambda += w * w;
        }
        waves.emplace_back(lambda, k);
      }
      std::size_t i = 0;
      while (i < d && k[i] == bound) k[i++] = -bound;
      if (i == d) break;
      ++k[i];
    }
    std::sort(waves.begin(), waves.end());
    std::size_t count = 0;
    double kth = 0.0;
    for (const auto& [lambda, vec] : waves) {
      count += std::all_of(vec.begin(), vec.end(), [](int v) { return v == 0; }) ? 1 : 2;
      if (count >= static_cast<std::size_t>(k_max + 1)) {
        kth = lambda;
        break;
      }
    }
    const double w_next = kTwoPi * (bound + 1) / pmax;
    if (count < static_cast<std::size_t>(k_max + 1) || kth >= w_next * w_next) continue;
    for (const auto& [lambda, vec] : waves) {
      if (lambda > kth) break;
      auto phase = [vec, periods](const Point& p) {
        double a = 0.0;
        for (std::size_t i = 0; i < vec.size(); ++i) a += kTwoPi * vec[i] * p.intrinsic[i] / periods[i];
        return a;
      };
      const int l = std::accumulate(vec.begin(), vec.end(), 0, [](int s, int v) { return s + std::abs(v); });
      if (l == 0) {
        spec.modes().push_back({0.0, 0, 0, 0, [](const Point&) { return 1.0; }});
        continue;
      }
      const int radial = static_cast<int>(spec.modes().size());
      spec.modes().push_back({lambda, l, radial, 0, [phase](const Point& p) {
                                return std::sqrt(2.0) * std::cos(phase(p));
                              }});
      spec.modes().push_back({lambda, l, radial, 1, [phase](const Point& p) {
                                return std::sqrt(2.0) * std::sin(phase(p));
                              }});
    }
    break;
  }
  spec.finalize(k_max);
  return spec;
}

ReferenceSpectrum weighted_circle_spectrum(double radius, const DensitySpec& dens, int k_max, int mesh,
                                           WeightedTarget target, double tolerance) {
  if (mesh < 512) throw DomainError("weighted_circle_spectrum: mesh must be >= 512");
  if (k_max < 0) throw DomainError("weighted_circle_spectrum: k_max must be >= 0");
  const auto mfd = ManifoldModel::circle(radius);
  dens.validate(mfd);
  ReferenceSpectrum spec(mfd, dens);
  spec.provenance.kind = Provenance::sturm_liouville;
  spec.provenance.mesh = mesh;
  spec.provenance.tolerance = tolerance;

  const double vol = mfd.total_volume();
  auto rho_at = [&](double theta) { return dens(mfd, mfd.make_point({wrap(theta, kTwoPi)})); };
  auto assemble = [&](int N, Eigen::SparseMatrix<double>& A, Eigen::VectorXd& M) {
    const double dt = kTwoPi / N;
    const double h = radius * dt;
    std::vector<Eigen::Triplet<double>> trip;
    M.resize(N);
    for (int i = 0; i < N; ++i) {
      const double r = rho_at(i * dt);
      M[i] = target == WeightedTarget::random_walk ? r * r : r / vol;
      const double face = std::pow(rho_at((i + 0.5) * dt), 2) / (h * h);
      const int j = (i + 1) % N;
      trip.emplace_back(i, i, face);
      trip.emplace_back(j, j, face);
      trip.emplace_back(i, j, -face);
      trip.emplace_back(j, i, -face);
    }
    A.resize(N, N);
    A.setFromTriplets(trip.begin(), trip.end());
  };
  const int count = std::min(k_max + 1, mesh / 8);
  auto sol = richardson_solve(assemble, mesh, count, tolerance, spec.provenance, "weighted_circle_spectrum");

  const double h = radius * kTwoPi / mesh;
  for (int k = 0; k < count; ++k) {
    Eigen::VectorXd v = sol.vectors.col(k);
    double norm = 0.0;
    for (int i = 0; i < mesh; ++i) norm += v[i] * v[i] * rho_at(i * kTwoPi / mesh) * h;
    v /= std::sqrt(norm);
    fix_sign(v);
    if (k == 0) v.setOnes();
    spec.modes().push_back({sol.values[static_cast<std::size_t>(k)], 0, k, 0, [v, mesh](const Point& p) {
                              const double t = wrap(p.intrinsic[0], kTwoPi) / kTwoPi * mesh;
                              const int i = std::min(static_cast<int>(t), mesh - 1);
                              const double w = t - i;
                              return (1.0 - w) * v[i] + w * v[(i + 1) % mesh];
                            }});
  }
  spec.finalize(k_max);
  return spec;
}

ReferenceSpectrum spindle_spectrum(int m, double c, int l_max, int k_max, int mesh, double tolerance) {
  if (mesh < 512) throw DomainError("spindle_spectrum: mesh must be >= 512");
  if (k_max < 0 || l_max < 0) throw DomainError("spindle_spectrum: k_max and l_max must be >= 0");
  const auto mfd = ManifoldModel::spindle(m, c);
  ReferenceSpectrum spec(mfd, DensitySpec::uniform());
  spec.provenance.kind = Provenance::sturm_liouville;
  spec.provenance.mesh = mesh;
  spec.provenance.tolerance = tolerance;
  const int d = m - 1;
  const int count = std::min(k_max + 1, mesh / 8);

  for (int l = 0; l <= l_max; ++l) {
    const double pot = sphere_harmonic_eigenvalue(d, l) / (c * c);
    auto assemble = [&](int N, Eigen::SparseMatrix<double>& A, Eigen::VectorXd& M) {
      const double h = kPi / N;
      std::vector<Eigen::Triplet<double>> trip;
      M.resize(N);
      for (int i = 0; i < N; ++i) {
        const double s = std::sin((i + 0.5) * h);
        M[i] = std::pow(s, d);
        trip.emplace_back(i, i, pot * M[i] / (s * s));
        if (i + 1 < N) {
          const double face = std::pow(std::sin((i + 1) * h), d) / (h * h);
          trip.emplace_back(i, i, face);
          trip.emplace_back(i + 1, i + 1, face);
          trip.emplace_back(i, i + 1, -face);
          trip.emplace_back(i + 1, i, -face);
        }
      }
      A.resize(N, N);
      A.setFromTriplets(trip.begin(), trip.end());
    };
    auto sol = richardson_solve(assemble, mesh, count, tolerance, spec.provenance,
                                "spindle_spectrum(l=" + std::to_string(l) + ")");
    const double h = kPi / mesh;
    const int mult = sphere_harmonic_multiplicity(d, l);
    for (int r = 0; r < count; ++r) {
      Eigen::VectorXd v = sol.vectors.col(r);
      double num = 0.0;
      double den = 0.0;
      for (int i = 0; i < mesh; ++i) {
        const double w = std::pow(std::sin((i + 0.5) * h), d);
        num += v[i] * v[i] * w;
        den += w;
      }
      v /= std::sqrt(num / den);
      fix_sign(v);
      if (l == 0 && r == 0) v.setOnes();
      auto radial = [v, mesh, h](double theta) {
        const double t = theta / h - 0.5;
        if (t <= 0.0) return v[0];
        if (t >= mesh - 1) return v[mesh - 1];
        const int i = static_cast<int>(t);
        const double w = t - i;
        return (1.0 - w) * v[i] + w * v[i + 1];
      };
      for (int cp = 0; cp < mult; ++cp) {
        ReferenceMode mode{sol.values[static_cast<std::size_t>(r)], l, r, cp, {}};
        if (harmonic_available(d, l)) {
          mode.f = [radial, d, l, cp](const Point& p) {
            const std::vector<double> angles(p.intrinsic.begin() + 1, p.intrinsic.end());
            const auto u = sphere_embed(angles);
            return radial(p.intrinsic[0]) * sphere_harmonic(d, l, cp, u, angles);
          };
        }
        spec.modes().push_back(std::move(mode));
      }
    }
  }
  spec.finalize(k_max);
  const double tail = sphere_harmonic_eigenvalue(d, l_max + 1) / (c * c);
  if (static_cast<int>(spec.size()) < k_max + 1 || spec.eigenvalue(spec.size() - 1) >= tail) {
    std::ostringstream msg;
    msg << "spindle_spectrum: l_max = " << l_max << " too small; fiber tail bound " << tail
        << " does not exceed the requested eigenvalues";
    throw DomainError(msg.str());
  }
  return spec;
}

namespace {

struct ChartAxis {
  double lo = 0.0;
  double hi = 0.0;
  bool periodic = true;
};

struct Chart {
  std::vector<ChartAxis> axes;
  std::function<std::vector<double>(const std::vector<double>&)> metric;  // diagonal g_ii
};

Chart chart_of(const ManifoldModel& mfd) {
  const double R = mfd.radius();
  switch (mfd.kind()) {
    case ManifoldKind::circle:
      return {{{0.0, kTwoPi, true}}, [R](const std::vector<double>&) { return std::vector<double>{R * R}; }};
    case ManifoldKind::sphere:
      if (mfd.dim() == 1) {
        return {{{0.0, kTwoPi, true}}, [R](const std::vector<double>&) { return std::vector<double>{R * R}; }};
      }
      if (mfd.dim() == 2) {
        return {{{0.0, kPi, false}, {0.0, kTwoPi, true}}, [R](const std::vector<double>& x) {
                  const double s = R * std::sin(x[0]);
                  return std::vector<double>{R * R, s * s};
                }};
      }
      break;
    case ManifoldKind::flat_torus: {
      if (mfd.dim() > 2) break;
      Chart ch;
      for (double p : mfd.periods()) ch.axes.push_back({0.0, p, true});
      const auto dim = static_cast<std::size_t>(mfd.dim());
      ch.metric = [dim](const std::vector<double>&) { return std::vector<double>(dim, 1.0); };
      return ch;
    }
    case ManifoldKind::spindle:
      if (mfd.dim() == 2) {
        return {{{0.0, kPi, false}, {0.0, kTwoPi, true}}, [R](const std::vector<double>& x) {
                  const double s = R * std::sin(x[0]);
                  return std::vector<double>{1.0, s * s};
                }};
      }
      break;
  }
  throw DomainError("appendix_ratio_check: charts of dimension <= 2 only (got " + mfd.tag() + ")");
}

double grad_norm(const ManifoldModel& mfd, const Chart& ch, const ManifoldFunction& f,
                 const std::vector<double>& x) {
  constexpr double kStep = 1e-5;
  const auto g = ch.metric(x);
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (g[i] < 1e-12) continue;
    auto lo = x;
    auto hi = x;
    double span = 2.0 * kStep;
    hi[i] += kStep;
    lo[i] -= kStep;
    if (!ch.axes[i].periodic) {
      if (lo[i] < ch.axes[i].lo) {
        lo[i] = x[i];
        span = kStep;
      }
      if (hi[i] > ch.axes[i].hi) {
        hi[i] = x[i];
        span = kStep;
      }
    }
    const double df = (f(mfd.make_point(hi)) - f(mfd.make_point(lo))) / span;
    sum += df * df / g[i];
  }
  return std::sqrt(sum);
}

/// Max of `objective` over the chart: tensor grid search followed by coordinate-wise
/// Brent refinement around the best grid point.
double chart_max(const Chart& ch, int grid, const std::function<double(const std::vector<double>&)>& objective) {
  const std::size_t dim = ch.axes.size();
  std::vector<int> counts;
  for (const auto& ax : ch.axes) counts.push_back(ax.periodic ? grid : grid / 2 + 1);
  auto coord = [&](std::size_t i, int j) {
    const auto& ax = ch.axes[i];
    const int denom = ax.periodic ? counts[i] : counts[i] - 1;
    return ax.lo + (ax.hi - ax.lo) * j / denom;
  };
  std::vector<int> idx(dim, 0);
  std::vector<double> best_x(dim, 0.0);
  double best = -1.0;
  for (;;) {
    std::vector<double> x(dim);
    for (std::size_t i = 0; i < dim; ++i) x[i] = coord(i, idx[i]);
    const double v = objective(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
    std::size_t i = 0;
    while (i < dim && idx[i] == counts[i] - 1) idx[i++] = 0;
    if (i == dim) break;
    ++idx[i];
  }
  for (int round = 0; round < 8; ++round) {
    for (std::size_t i = 0; i < dim; ++i) {
      const auto& ax = ch.axes[i];
      const double step = (ax.hi - ax.lo) / (ax.periodic ? counts[i] : counts[i] - 1);
      double a = best_x[i] - step;
      double b = best_x[i] + step;
      if (!ax.periodic) {
        a = std::max(a, ax.lo);
        b = std::min(b, ax.hi);
      }
      auto neg = [&](double t) {
        auto x = best_x;
        x[i] = t;
        return -objective(x);
      };
      const auto [t, val] = boost::math::tools::brent_find_minima(neg, a, b, 50);
      if (-val > best) {
        best = -val;
        best_x[i] = t;
      }
    }
  }
  return best;
}

}  // namespace

std::vector<AppendixRatioRow> appendix_ratio_check(const ReferenceSpectrum& spectrum, int k_max, int grid) {
  if (grid < 16) throw DomainError("appendix_ratio_check: grid must be >= 16");
  const auto& mfd = spectrum.manifold();
  const auto& dens = spectrum.density();
  const Chart ch = chart_of(mfd);
  std::vector<AppendixRatioRow> rows;
  const int last = std::min(k_max, static_cast<int>(spectrum.size()) - 1);
  for (int k = 0; k <= last; ++k) {
    const auto& mode = spectrum.modes()[static_cast<std::size_t>(k)];
    AppendixRatioRow row;
    row.k = k;
    row.eigenvalue = mode.eigenvalue;
    if (!mode.f) {
      row.sup_ratio = row.lip_ratio = row.sup_ratio_fine = row.lip_ratio_fine = std::nan("");
      rows.push_back(row);
      continue;
    }
    const auto& f = mode.f;
    const double l2 = std::sqrt(
        integrate_over(mfd, [&](const Point& p) { return f(p) * f(p) * dens(mfd, p); }, nullptr, 0,
                       nullptr, 1e-12));
    auto sup = [&](const std::vector<double>& x) { return std::fabs(f(mfd.make_point(x))); };
    auto lip = [&](const std::vector<double>& x) { return grad_norm(mfd, ch, f, x); };
    row.sup_ratio = chart_max(ch, grid, sup) / l2;
    row.lip_ratio = chart_max(ch, grid, lip) / l2;
    row.sup_ratio_fine = chart_max(ch, 2 * grid, sup) / l2;
    row.lip_ratio_fine = chart_max(ch, 2 * grid, lip) / l2;
    auto close = [](double a, double b) {
      return std::isfinite(a) && std::isfinite(b) && std::fabs(a - b) <= 1e-6 * std::max(1.0, std::fabs(a));
    };
    row.stable = close(row.sup_ratio, row.sup_ratio_fine) && close(row.lip_ratio, row.lip_ratio_fine);
    rows.push_back(row);
  }
  return rows;
}

Fixture make_fixture(const ReferenceSpectrum& spectrum, const std::string& name) {
  Fixture fx;
  fx.name = name;
  fx.mesh = spectrum.provenance.mesh;
  fx.tolerance = spectrum.provenance.tolerance;
  fx.richardson_min = spectrum.provenance.richardson_min;
  fx.richardson_max = spectrum.provenance.richardson_max;
  std::map<std::pair<int, int>, std::size_t> slot;
  for (const auto& m : spectrum.modes()) {
    const auto key = std::make_pair(m.l, m.radial);
    auto it = slot.find(key);
    if (it == slot.end()) {
      slot.emplace(key, fx.rows.size());
      fx.rows.push_back({m.l, m.radial, 1, m.eigenvalue});
    } else {
      ++fx.rows[it->second].multiplicity;
    }
  }
  return fx;
}

void write_fixture(std::ostream& os, const Fixture& fx) {
  os << "# fixture=" << fx.name << " mesh=" << fx.mesh << std::setprecision(17)
     << " tolerance=" << fx.tolerance << " richardson_min=" << fx.richardson_min
     << " richardson_max=" << fx.richardson_max << "\n";
  os << "l,radial,multiplicity,eigenvalue\n";
  for (const auto& r : fx.rows) os << r.l << ',' << r.radial << ',' << r.multiplicity << ',' << r.eigenvalue << '\n';
}

Fixture read_fixture(std::istream& is) {
  Fixture fx;
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ss(line.substr(1));
      std::string tok;
      while (ss >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const auto key = tok.substr(0, eq);
        const auto val = tok.substr(eq + 1);
        if (key == "fixture") fx.name = val;
        else if (key == "mesh") fx.mesh = std::stoi(val);
        else if (key == "tolerance") fx.tolerance = std::stod(val);
        else if (key == "richardson_min") fx.richardson_min = std::stod(val);
        else if (key == "richardson_max") fx.richardson_max = std::stod(val);
      }
      continue;
    }
    if (!header_seen) {
      if (line != "l,radial,multiplicity,eigenvalue") throw ConfigError("fixture: unexpected header '" + line + "'");
      header_seen = true;
      continue;
    }
    FixtureRow r;
    char c1 = 0, c2 = 0, c3 = 0;
    std::istringstream ss(line);
    if (!(ss >> r.l >> c1 >> r.radial >> c2 >> r.multiplicity >> c3 >> r.eigenvalue) || c1 != ',' ||
        c2 != ',' || c3 != ',') {
      throw ConfigError("fixture: malformed row '" + line + "'");
    }
    fx.rows.push_back(r);
  }
  if (!header_seen) throw ConfigError("fixture: missing header");
  return fx;
}

Fixture read_fixture_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open fixture " + path);
  return read_fixture(in);
}

std::vector<double> fixture_eigenvalues(const Fixture& fx) {
  std::vector<double> out;
  for (const auto& r : fx.rows) out.insert(out.end(), static_cast<std::size_t>(r.multiplicity), r.eigenvalue);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace spectral_limits
