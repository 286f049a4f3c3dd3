// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "spectral_limits/experiment.hpp"

using namespace spectral_limits;

namespace {

const std::string kFixtures = SPECTRAL_LIMITS_FIXTURE_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

ExperimentConfig config(const std::string& text) { return parse_config(text); }

std::vector<double> column(const std::vector<SpectrumRow>& rows, int k, std::size_t n,
                           const std::function<double(const SpectrumRow&)>& get) {
  std::vector<double> out;
  for (const auto& r : rows) {
    if (r.k == k && r.n == n) out.push_back(r.connected ? get(r) : std::nan(""));
  }
  return out;
}

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi / *lo;
}

Outcome a1() {
  const auto rows = run_spectrum_experiment(config("n = [4000]\nseeds = [1, 2, 3, 4, 5]\nk_max = 3\n"));
  const auto e1 = column(rows, 1, 4000, [](const SpectrumRow& r) { return std::fabs(r.scaled - 1.0); });
  const auto e3 = column(rows, 3, 4000, [](const SpectrumRow& r) { return std::fabs(r.scaled - 4.0); });
  const double m1 = median(e1);
  const double m3 = median(e3);
  return {all_finite(e1) && all_finite(e3) && m1 <= 0.20 && m3 <= 0.8,
          "median |3l1-1| = " + fmt("%.4f", m1) + ", median |3l3-4| = " + fmt("%.4f", m3)};
}

Outcome a2() {
  const auto rows =
      run_spectrum_experiment(config("manifold = \"sphere\"\nn = [3000]\nseeds = [1, 2, 3, 4, 5]\nk_max = 3\n"));
  bool ok = true;
  std::string detail = "median 4 l_k =";
  for (int k = 1; k <= 3; ++k) {
    const auto v = column(rows, k, 3000, [](const SpectrumRow& r) { return r.scaled; });
    const double m = median(v);
    ok = ok && all_finite(v) && m >= 1.5 && m <= 2.5;
    detail += fmt(" %.4f", m);
  }
  return {ok, detail};
}

Outcome a3() {
  const auto sweep =
      run_convergence_sweep(config("n = [500, 1000, 2000, 4000]\nseeds = [1, 2, 3, 4, 5]\nk_max = 1\n"));
  double slope = std::nan("");
  std::string detail = "median |3l1-1| by n:";
  for (const auto& s : sweep.summary) {
    if (s.k != 1) continue;
    slope = s.slope;
    detail += fmt(" %.4f", s.median_abs_error);
  }
  return {slope <= -0.1, detail + ", slope = " + fmt("%.3f", slope)};
}

Outcome a4() {
  std::vector<double> medians;
  std::string detail = "median relative residual";
  for (std::size_t n : {1000U, 3000U}) {
    auto cfg = config("manifold = \"sphere\"\nseeds = [1, 2, 3, 4, 5]\n[alignment]\ncluster = [1, 3]\n");
    cfg.n = {n};
    std::vector<double> res;
    for (const auto& r : run_alignment(cfg)) {
      if (r.functions.empty()) res.push_back(std::nan(""));
      for (const auto& f : r.functions) res.push_back(f.relative_residual);
    }
    medians.push_back(all_finite(res) ? median(res) : std::nan(""));
    detail += " n=" + std::to_string(n) + ": " + fmt("%.4f", medians.back());
  }
  return {medians[1] <= 0.3 && medians[1] <= medians[0], detail};
}

Outcome a5() {
  const auto mfd = ManifoldModel::circle(1.0);
  const auto cloud = sample_dataset(mfd, DensitySpec::uniform(), 500, 5);
  const double eps = epsilon_schedule(500, 1);
  const auto g = gamma_N_eps(cloud, eps);
  const auto L = random_walk_matrix(cloud, eps);
  Xoshiro256 rng(55);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    GraphFunction phi(500);
    for (Eigen::Index i = 0; i < phi.size(); ++i) phi[i] = 2.0 * rng.uniform() - 1.0;
    worst = std::max(worst, (L.apply(phi) - laplacian_apply(g, phi)).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-12, "max abs deviation = " + fmt("%.3g", worst)};
}

Outcome a6() {
  const auto torus = ManifoldModel::flat_torus({1.0, 1.0});
  const auto v = v_p_eps(torus, 4.0, 0.3, 1.0, 200000, 6);
  const auto circle = ManifoldModel::circle(1.0);
  const auto s = s_eps(circle, MetricPair::geodesic_embedded, 1.0, 20000, 400, 6);
  const double rv = std::fabs(v.value - 0.00750) / 0.00750;
  const double rs = std::fabs(s.value - 0.59313) / 0.59313;
  return {rv <= 0.02 && rs <= 0.03, "V_p = " + fmt("%.7f", v.value) + " (rel " + fmt("%.4f", rv) + "), S_eps = " +
                                        fmt("%.5f", s.value) + " (rel " + fmt("%.4f", rs) + ")"};
}

Outcome a7() {
  double worst = 0.0;
  for (const auto& mfd : {ManifoldModel::sphere(2, 1.0), ManifoldModel::flat_torus({1.0, 1.0})}) {
    Xoshiro256 rng(7);
    for (int s = 0; s < 8; ++s) {
      const auto x = mfd.sample_uniform(rng);
      double prev = bishop_gromov_ratio(mfd, x, 1e-3 * mfd.diameter(), 1.0);
      for (int i = 2; i <= 200; ++i) {
        const double v = bishop_gromov_ratio(mfd, x, 5e-3 * i * mfd.diameter(), 1.0);
        worst = std::max(worst, v - prev);
        prev = v;
      }
    }
  }
  return {worst <= 1e-8, "largest increase = " + fmt("%.3g", worst)};
}

Outcome a8() {
  const auto rows = run_regularity(
      config("n = [500, 1000, 2000]\nseeds = [1]\nk_max = 1\n[regularity]\ncenters = 24\nmax_exact_ball = 400\n"));
  std::vector<double> Q, P, R;
  std::string detail;
  for (const auto& r : rows) {
    Q.push_back(r.certificate.Q);
    P.push_back(r.certificate.P);
    R.push_back(r.certificate.R);
    detail += "n=" + std::to_string(r.certificate.n) + " Q=" + fmt("%.3f", r.certificate.Q) +
              " P=" + fmt("%.3f", r.certificate.P) + " R=" + fmt("%.3f", r.certificate.R) + "; ";
  }
  const bool ok = all_finite(Q) && all_finite(P) && all_finite(R) && spread(Q) <= 4.0 && spread(P) <= 4.0 &&
                  spread(R) <= 4.0;
  return {ok, detail};
}

Outcome a9() {
  // per k, median over seeds of ||phi_k||_4 / ||phi_k||_1 at each n
  const std::vector<std::size_t> ns{1000, 4000};
  std::vector<std::vector<double>> med(6);
  for (std::size_t n : ns) {
    std::vector<std::vector<double>> ratios(6);
    for (std::uint64_t seed : {1U, 2U, 3U}) {
      const auto mfd = ManifoldModel::circle(1.0);
      const auto cloud = sample_dataset(mfd, DensitySpec::uniform(), n, seed);
      const auto g = gamma_N_eps(cloud, epsilon_schedule(n, 1));
      const auto spec = eigen_decompose(g, 5);
      const double alpha = moser_alpha(g);
      const double D = graph_diameter(g);
      for (int k = 1; k <= 5; ++k) ratios[k].push_back(moser_check(g, spec, k, 4.0, alpha, D).ratio);
    }
    for (int k = 1; k <= 5; ++k) med[k].push_back(median(ratios[k]));
  }
  double worst = 1.0;
  for (int k = 1; k <= 5; ++k) {
    if (!all_finite(med[k])) return {false, "non-finite Moser ratio at k=" + std::to_string(k)};
    worst = std::max(worst, spread(med[k]));
  }
  return {worst <= 2.0, "largest ratio change between n=1000 and n=4000 = " + fmt("%.4f", worst)};
}

Outcome a10() {
  auto cfg = config("density = \"cosine_tilt\"\namplitude = 0.2\nn = [4000]\nseeds = [1, 2, 3, 4, 5]\nk_max = 1\n");
  cfg.reference_fixture = kFixtures + "/weighted_circle_a0.2.csv";
  const auto rows = run_spectrum_experiment(cfg);
  const auto rel = column(rows, 1, 4000, [](const SpectrumRow& r) { return r.rel_error; });
  const double m = median(rel);
  return {all_finite(rel) && m <= 0.25,
          "median relative error = " + fmt("%.4f", m) + " (reference " + fmt("%.6f", rows[1].reference) + ")"};
}

Outcome a11() {
  auto cfg = config("manifold = \"spindle\"\nn = [4000]\nseeds = [1, 2, 3, 4, 5]\nk_max = 1\n");
  cfg.reference_fixture = kFixtures + "/spindle_m3_c0.70710678.csv";
  const auto rows = run_spectrum_experiment(cfg);
  const auto rel = column(rows, 1, 4000, [](const SpectrumRow& r) { return r.rel_error; });
  const auto scaled = column(rows, 1, 4000, [](const SpectrumRow& r) { return r.scaled; });
  const double m = median(rel);
  return {all_finite(rel) && m <= 0.4, "median 5 l1 = " + fmt("%.4f", median(scaled)) + " vs " +
                                           fmt("%.4f", rows[1].reference) + ", relative error " + fmt("%.4f", m)};
}

Outcome a12() {
  const auto circle = ManifoldModel::circle(1.0);
  const auto r = bernstein_empirical_check(circle, DensitySpec::uniform(),
                                           [](const Point& p) { return std::cos(p.intrinsic[0]); }, 500, 0.1, 200, 12);
  return {r.within_contract(), "violation rate " + fmt("%.4f", r.violation_rate) + " <= limit " +
                                   fmt("%.4f", r.contract_limit)};
}

WeightedGraph sampled_graph(const ManifoldModel& mfd, const DensitySpec& dens, std::size_t n, std::uint64_t seed,
                            bool gamma_m) {
  const auto cloud = sample_dataset(mfd, dens, n, seed);
  const double eps = 1.3 * epsilon_schedule(n, mfd.dim());
  return gamma_m ? gamma_m_eps(cloud, eps, mfd.total_volume()) : gamma_N_eps(cloud, eps);
}

Outcome a13() {
  const auto circle = ManifoldModel::circle(1.0);
  std::vector<WeightedGraph> graphs;
  graphs.push_back(sampled_graph(circle, DensitySpec::uniform(), 300, 1, false));
  graphs.push_back(sampled_graph(circle, DensitySpec::uniform(), 512, 2, true));
  graphs.push_back(sampled_graph(circle, DensitySpec::cosine_tilt(circle, 0.2), 400, 3, false));
  graphs.push_back(sampled_graph(ManifoldModel::sphere(2, 1.0), DensitySpec::uniform(), 500, 4, false));
  graphs.push_back(sampled_graph(ManifoldModel::flat_torus({1.0, 1.0}), DensitySpec::uniform(), 450, 5, true));
  graphs.push_back(sampled_graph(ManifoldModel::spindle(3, ManifoldModel::kSpindleWarp), DensitySpec::uniform(),
                                 500, 6, false));
  EigenOptions dense;
  dense.solver = SolverChoice::dense;
  EigenOptions lanczos;
  lanczos.solver = SolverChoice::lanczos;
  double worst = 0.0;
  std::size_t used = 0;
  for (const auto& g : graphs) {
    if (!g.connected()) continue;
    ++used;
    const auto a = eigen_decompose(g, 10, 1e-12, dense);
    const auto b = eigen_decompose(g, 10, 1e-12, lanczos);
    for (int k = 0; k <= 10; ++k) {
      const double dev = std::fabs(a.eigenvalues[k] - b.eigenvalues[k]) / std::max(1.0, std::fabs(a.eigenvalues[k]));
      worst = std::max(worst, dev);
    }
  }
  return {used == graphs.size() && worst <= 1e-8,
          std::to_string(used) + " graphs, max relative deviation = " + fmt("%.3g", worst)};
}

Outcome a14() {
  double worst = 0.0;
  for (const auto& row : appendix_ratio_check(circle_spectrum(1.0, 4), 4)) {
    if (row.k >= 1) worst = std::max(worst, std::fabs(row.sup_ratio - std::sqrt(2.0)));
  }
  for (const auto& row : appendix_ratio_check(sphere_spectrum(2, 1.0, 3), 3)) {
    if (row.k >= 1) worst = std::max(worst, std::fabs(row.sup_ratio - std::sqrt(3.0)));
  }
  return {worst <= 1e-6, "max deviation from sqrt2 / sqrt3 = " + fmt("%.3g", worst)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    Outcome (*run)();
    double budget_s;  // 0 when the criterion carries no runtime bound
  };
  const std::vector<Criterion> criteria{
      {"A1", a1, 60.0}, {"A2", a2, 120.0}, {"A3", a3, 0.0}, {"A4", a4, 0.0},  {"A5", a5, 0.0},
      {"A6", a6, 0.0},  {"A7", a7, 0.0},   {"A8", a8, 0.0}, {"A9", a9, 0.0},  {"A10", a10, 0.0},
      {"A11", a11, 300.0}, {"A12", a12, 0.0}, {"A13", a13, 0.0}, {"A14", a14, 0.0},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0.0 && secs > c.budget_s) {
      o.pass = false;
      o.detail += ", over the " + fmt("%.0f", c.budget_s) + " s budget";
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s %s: %s [%.1f s]\n", c.id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
