#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "spectral_limits/rng.hpp"

namespace spectral_limits {

/// Class parameters (m, K, D, v) of a closed Riemannian manifold.
struct ModelParams {
  int m = 1;
  double K = 1.0;
  double D = 1.0;
  double v = 0.5;

  void validate() const;
};

enum class ManifoldKind { circle, sphere, flat_torus, spindle };

std::string to_string(ManifoldKind kind);
ManifoldKind manifold_kind_from_string(const std::string& name);

struct Point {
  std::vector<double> intrinsic;
  std::vector<double> embedded;
};

/// One of the four shipped model spaces together with its isometric embedding.
///
/// Intrinsic charts:
///   circle      theta in [0, 2pi)
///   sphere      hyperspherical angles (a_1..a_m), last coordinate = radius*cos(a_1)
///   flat_torus  x_i in [0, p_i)
///   spindle     (theta, fiber angles on S^{m-1}), theta in [0, pi]
class ManifoldModel {
 public:
  static ManifoldModel circle(double radius = 1.0);
  static ManifoldModel sphere(int m = 2, double radius = 1.0);
  static ManifoldModel flat_torus(std::vector<double> periods);
  static ManifoldModel spindle(int m = 3, double c = kSpindleWarp);

  static constexpr double kSpindleWarp = 0.70710678118654752440;

  ManifoldKind kind() const noexcept { return kind_; }
  std::string tag() const;
  int dim() const noexcept { return m_; }
  int embedding_dim() const noexcept { return d_; }
  int intrinsic_dim() const noexcept { return m_; }
  /// L with d_g <= L * d_{R^d} on the whole manifold.
  double embedding_constant() const noexcept { return L_; }
  double total_volume() const noexcept { return volume_; }
  double diameter() const noexcept;
  double radius() const noexcept { return radius_; }
  double warp() const noexcept { return radius_; }
  const std::vector<double>& periods() const noexcept { return periods_; }

  Point make_point(std::vector<double> intrinsic) const;
  /// Uniform with respect to the Riemannian volume.
  Point sample_uniform(Xoshiro256& rng) const;

  bool operator==(const ManifoldModel& other) const;
  bool operator!=(const ManifoldModel& other) const { return !(*this == other); }

 private:
  ManifoldModel() = default;

  ManifoldKind kind_ = ManifoldKind::circle;
  int m_ = 1;
  int d_ = 2;
  double radius_ = 1.0;  // circle/sphere radius, spindle warp c
  std::vector<double> periods_;
  double L_ = 1.0;
  double volume_ = 0.0;
};

/// Points of S^k in R^{k+1} from hyperspherical angles, and back.
std::vector<double> sphere_embed(std::span<const double> angles);
std::vector<double> sphere_angles(std::span<const double> unit_vector);

/// First coordinate of the spindle embedding, int_0^theta sqrt(1 - c^2 cos^2 phi) dphi.
double spindle_profile(double theta, double c);

double model_sn(double K, double r);
/// V_K(r) = vol(S^{m-1}) int_0^r sn_K(t)^{m-1} dt.
double model_ball_volume(int m, double K, double r);
/// omega_m = pi^{m/2} / Gamma(m/2 + 1).
double unit_ball_volume(int m);
/// vol(S^{k}) = (k+1) omega_{k+1}.
double unit_sphere_area(int k);

double geodesic_distance(const ManifoldModel& mfd, const Point& x, const Point& y);
double embedding_distance(const ManifoldModel& mfd, const Point& x, const Point& y);

struct BallVolume {
  double value = 0.0;
  double std_error = 0.0;
  bool exact = true;
};

/// vol_g(B(x, r)). Closed form for circle, sphere, flat torus of dimension <= 2;
/// Monte-Carlo otherwise, which requires `rng`.
BallVolume ball_volume(const ManifoldModel& mfd, const Point& x, double r,
                       Xoshiro256* rng = nullptr, std::size_t n_mc = 200000);

double bishop_gromov_ratio(const ManifoldModel& mfd, const Point& x, double r, double K,
                           Xoshiro256* rng = nullptr);

/// int_M f dvol. Nested adaptive quadrature for intrinsic dimension <= 2, uniform
/// Monte-Carlo with `rng` otherwise (the standard error is written to `stderr_out`).
double integrate_over(const ManifoldModel& mfd, const std::function<double(const Point&)>& f,
                      Xoshiro256* rng = nullptr, std::size_t n_mc = 200000,
                      double* stderr_out = nullptr, double tolerance = 1e-9);

}  // namespace spectral_limits
