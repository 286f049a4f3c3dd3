#pragma once

#include <cstdint>

#include "spectral_limits/geometry.hpp"

namespace spectral_limits {

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// Which surrogate metric d~ is compared against d_g in S_eps.
enum class MetricPair { geodesic_embedded, geodesic_geodesic };

struct DistortionEstimate {
  McEstimate v_p_eps;
  McEstimate s_eps;
  double p = 2.0;
  double eps = 0.0;
  double K = 1.0;
  std::size_t n_mc = 0;
  std::size_t n_outer = 0;
  std::size_t n_inner = 0;
  std::uint64_t seed = 0;
};

/// (int_M |1 - vol B(x, eps) / V_K(eps)|^p dvol)^{1/p} by uniform Monte-Carlo over M.
/// The standard error of the p-th power integral is mapped through t -> t^{1/p}
/// with the delta method.
McEstimate v_p_eps(const ManifoldModel& mfd, double p, double eps, double K, std::size_t n_mc,
                   std::uint64_t seed);

/// int_M vol(B~(x, eps) \ B(x, eps)) dvol by nested Monte-Carlo; fresh inner samples
/// per outer point, scaled by vol(M)^2. Outer chunks use derive_seed(seed, chunk).
McEstimate s_eps(const ManifoldModel& mfd, MetricPair metrics, double eps, std::size_t n_outer,
                 std::size_t n_inner, std::uint64_t seed, unsigned threads = 1);

struct TheoremErrorTerms {
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
};

/// (eps^{m/(m+2)}, v eps^{-2/(m+2)}, s eps^{-m}), unscaled.
TheoremErrorTerms theorem_error_terms(int m, double eps, double v_m2_eps, double s_eps);

/// a + eps^{min(1 - 2/p, m/(p-2) - 2/p)} + v eps^{-2/p} + eps^{-m} s.
double delta_p_eps_a(int m, double p, double eps, double a, double v_p_eps, double s_eps);

}  // namespace spectral_limits
