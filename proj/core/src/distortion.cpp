#include "spectral_limits/distortion.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

#include "spectral_limits/errors.hpp"

namespace spectral_limits {

namespace {

constexpr std::size_t kChunk = 256;

}  // namespace

McEstimate v_p_eps(const ManifoldModel& mfd, double p, double eps, double K, std::size_t n_mc,
                   std::uint64_t seed) {
  if (!(p >= 1.0)) throw DomainError("v_p_eps: p must be >= 1");
  if (!(eps > 0.0)) throw DomainError("v_p_eps: eps must be positive");
  if (n_mc < 2) throw DomainError("v_p_eps: need at least two samples");
  const double model = model_ball_volume(mfd.dim(), K, eps);
  Xoshiro256 rng(seed);
  Xoshiro256 inner(derive_seed(seed, 1));
  double sum = 0.0;
  double sum2 = 0.0;
  for (std::size_t i = 0; i < n_mc; ++i) {
    const Point x = mfd.sample_uniform(rng);
    const double vol = ball_volume(mfd, x, eps, &inner, 4000).value;
    const double v = std::pow(std::fabs(1.0 - vol / model), p);
    sum += v;
    sum2 += v * v;
  }
  const double n = static_cast<double>(n_mc);
  const double mean = sum / n;
  const double var = std::max(sum2 / n - mean * mean, 0.0) * n / (n - 1.0);
  const double integral = mfd.total_volume() * mean;
  const double se_integral = mfd.total_volume() * std::sqrt(var / n);
  McEstimate out;
  out.samples = n_mc;
  out.value = std::pow(integral, 1.0 / p);
  out.std_error = integral > 0.0 ? std::pow(integral, 1.0 / p - 1.0) * se_integral / p : 0.0;
  return out;
}

McEstimate s_eps(const ManifoldModel& mfd, MetricPair metrics, double eps, std::size_t n_outer,
                 std::size_t n_inner, std::uint64_t seed, unsigned threads) {
  if (!(eps > 0.0)) throw DomainError("s_eps: eps must be positive");
  if (n_outer < 2 || n_inner < 1) throw DomainError("s_eps: need n_outer >= 2 and n_inner >= 1");
  McEstimate out;
  out.samples = n_outer * n_inner;
  if (metrics == MetricPair::geodesic_geodesic) return out;  // empty set difference

  const std::size_t n_chunks = (n_outer + kChunk - 1) / kChunk;
  std::vector<double> fraction(n_outer, 0.0);
  auto run_chunk = [&](std::size_t c) {
    Xoshiro256 rng(derive_seed(seed, c));
    const std::size_t lo = c * kChunk;
    const std::size_t hi = std::min(n_outer, lo + kChunk);
    for (std::size_t i = lo; i < hi; ++i) {
      const Point x = mfd.sample_uniform(rng);
      std::size_t hits = 0;
      for (std::size_t j = 0; j < n_inner; ++j) {
        const Point y = mfd.sample_uniform(rng);
        if (embedding_distance(mfd, x, y) < eps && geodesic_distance(mfd, x, y) >= eps) ++hits;
      }
      fraction[i] = static_cast<double>(hits) / static_cast<double>(n_inner);
    }
  };
  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(n_chunks)));
  if (threads == 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t c = t; c < n_chunks; c += threads) run_chunk(c);
      });
    }
    for (auto& th : pool) th.join();
  }
  double sum = 0.0;
  double sum2 = 0.0;
  for (double f : fraction) {
    sum += f;
    sum2 += f * f;
  }
  const double n = static_cast<double>(n_outer);
  const double mean = sum / n;
  const double var = std::max(sum2 / n - mean * mean, 0.0) * n / (n - 1.0);
  const double vol2 = mfd.total_volume() * mfd.total_volume();
  out.value = vol2 * mean;
  out.std_error = vol2 * std::sqrt(var / n);
  return out;
}

TheoremErrorTerms theorem_error_terms(int m, double eps, double v_m2_eps, double s_eps) {
  if (m < 1 || !(eps > 0.0)) throw DomainError("theorem_error_terms: need m >= 1 and eps > 0");
  if (v_m2_eps < 0.0 || s_eps < 0.0) throw DomainError("theorem_error_terms: negative input");
  return {std::pow(eps, static_cast<double>(m) / (m + 2)),
          v_m2_eps * std::pow(eps, -2.0 / (m + 2)), s_eps * std::pow(eps, -m)};
}

double delta_p_eps_a(int m, double p, double eps, double a, double v_p_eps, double s_eps) {
  if (!(p > 2.0)) throw DomainError("delta_p_eps_a: p must exceed 2");
  if (!(eps > 0.0)) throw DomainError("delta_p_eps_a: eps must be positive");
  const double exponent = std::min(1.0 - 2.0 / p, m / (p - 2.0) - 2.0 / p);
  return a + std::pow(eps, exponent) + v_p_eps * std::pow(eps, -2.0 / p) + std::pow(eps, -m) * s_eps;
}

}  // namespace spectral_limits
