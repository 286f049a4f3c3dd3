#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "spectral_limits/geometry.hpp"
#include "spectral_limits/sampling.hpp"

namespace spectral_limits {

using ManifoldFunction = std::function<double(const Point&)>;

enum class Provenance { closed_form, sturm_liouville };
std::string to_string(Provenance p);

struct ProvenanceInfo {
  Provenance kind = Provenance::closed_form;
  int mesh = 0;
  double tolerance = 0.0;
  /// Extremes of (lambda_{N/4} - lambda_{N/2}) / (lambda_{N/2} - lambda_N) over the
  /// eigenvalues whose mesh differences rise above round-off.
  double richardson_min = 0.0;
  double richardson_max = 0.0;
};

/// One eigenpair. `l` is the fiber/angular harmonic degree, `radial` the index within
/// that degree and `copy` enumerates the degenerate copies. `f` is empty when no
/// evaluator is available (high-degree harmonics on S^m with m >= 3).
struct ReferenceMode {
  double eigenvalue = 0.0;
  int l = 0;
  int radial = 0;
  int copy = 0;
  ManifoldFunction f;
};

/// Ascending eigenvalues with eigenfunctions normalized in L^2(rho vol).
class ReferenceSpectrum {
 public:
  ReferenceSpectrum(ManifoldModel mfd, DensitySpec dens) : mfd_(std::move(mfd)), dens_(std::move(dens)) {}

  const ManifoldModel& manifold() const noexcept { return mfd_; }
  const DensitySpec& density() const noexcept { return dens_; }
  const std::vector<ReferenceMode>& modes() const noexcept { return modes_; }
  std::vector<ReferenceMode>& modes() noexcept { return modes_; }
  ProvenanceInfo provenance;

  std::size_t size() const noexcept { return modes_.size(); }
  double eigenvalue(std::size_t k) const { return modes_.at(k).eigenvalue; }
  std::vector<double> eigenvalues() const;
  /// Index ranges [first, last] of eigenvalues equal within `rel_tol` (relative to max(1, |lambda|)).
  std::vector<std::pair<int, int>> clusters(double rel_tol = 1e-9) const;
  std::vector<int> multiplicities(double rel_tol = 1e-9) const;
  /// Sorts modes ascending (stable in l, radial, copy) and truncates to k_max + 1 entries,
  /// extended to the end of a degenerate cluster cut by the truncation.
  void finalize(int k_max);

 private:
  ManifoldModel mfd_;
  DensitySpec dens_;
  std::vector<ReferenceMode> modes_;
};

/// (j / R)^2, multiplicity 2 for j >= 1; eigenfunctions 1, sqrt2 cos(j theta), sqrt2 sin(j theta).
ReferenceSpectrum circle_spectrum(double radius, int k_max);

/// l (l + m - 1) / R^2 with the dimension of degree-l harmonics as multiplicity.
/// Evaluators for l <= 1 in every dimension and for all l on S^2.
ReferenceSpectrum sphere_spectrum(int m, double radius, int k_max);

/// |2 pi k / p|^2 over integer vectors k, with cos/sin plane waves.
ReferenceSpectrum flat_torus_spectrum(const std::vector<double>& periods, int k_max);

/// Which continuum operator the weighted circle solver targets.
enum class WeightedTarget { random_walk, unnormalized };

/// Finite differences for -(rho^2 f')' / rho^2 (random_walk, the limit of Gamma^N) or
/// -vol(M) (rho^2 f')' / rho (unnormalized, the limit of Gamma_m) on the periodic circle.
/// Solved on meshes N, N/2 and N/4; eigenvalues are Richardson-extrapolated and the
/// mesh-doubling ratio must lie in [3, 5].
ReferenceSpectrum weighted_circle_spectrum(double radius, const DensitySpec& dens, int k_max,
                                           int mesh, WeightedTarget target = WeightedTarget::random_walk,
                                           double tolerance = 1e-13);

/// Cell-centered finite differences for -f'' - (m-1) cot(theta) f' + mu_l / (c^2 sin^2 theta) f
/// per fiber harmonic degree l <= l_max, merged over l. Throws DomainError when the
/// truncation tail bound mu_{l_max+1} / c^2 does not exceed lambda_{k_max}.
ReferenceSpectrum spindle_spectrum(int m, double c, int l_max, int k_max, int mesh,
                                   double tolerance = 1e-13);

/// mu_l = l (l + d - 1) and multiplicity of degree-l harmonics on S^d.
double sphere_harmonic_eigenvalue(int d, int l);
int sphere_harmonic_multiplicity(int d, int l);

struct AppendixRatioRow {
  int k = 0;
  double eigenvalue = 0.0;
  double sup_ratio = 0.0;       // ||f||_inf / ||f||_2 on the base grid
  double lip_ratio = 0.0;       // Lip(f) / ||f||_2 on the base grid
  double sup_ratio_fine = 0.0;  // same on the doubled grid
  double lip_ratio_fine = 0.0;
  bool stable = false;          // both pairs agree within 1e-6 and are finite
};

/// ||f_k||_2 by quadrature; sup and Lipschitz norms on a tensor grid of the chart
/// (`grid` points per angle, doubled for the stability check) with central-difference
/// gradients. Charts up to dimension 2.
std::vector<AppendixRatioRow> appendix_ratio_check(const ReferenceSpectrum& spectrum, int k_max,
                                                   int grid = 256);

struct FixtureRow {
  int l = 0;
  int radial = 0;
  int multiplicity = 1;
  double eigenvalue = 0.0;
};

struct Fixture {
  std::string name;
  int mesh = 0;
  double tolerance = 0.0;
  double richardson_min = 0.0;
  double richardson_max = 0.0;
  std::vector<FixtureRow> rows;
};

/// One row per (l, radial) pair, ascending.
Fixture make_fixture(const ReferenceSpectrum& spectrum, const std::string& name);
void write_fixture(std::ostream& os, const Fixture& fixture);
Fixture read_fixture(std::istream& is);
Fixture read_fixture_file(const std::string& path);
/// Eigenvalues of the fixture expanded by multiplicity, ascending.
std::vector<double> fixture_eigenvalues(const Fixture& fixture);

}  // namespace spectral_limits
