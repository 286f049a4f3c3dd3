#include "spectral_limits/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "spectral_limits/errors.hpp"

namespace spectral_limits {

std::vector<Cell> sweep_cells(const ExperimentConfig& cfg) {
  std::vector<Cell> out;
  for (auto n : cfg.n) {
    for (auto s : cfg.seeds) out.push_back({n, s});
  }
  return out;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

CellGraph build_cell(const ExperimentConfig& cfg, const Cell& cell) {
  const auto mfd = cfg.make_manifold();
  const auto dens = cfg.make_density(mfd);
  auto cloud = sample_dataset(mfd, dens, cell.n, cell.seed);
  const double eps = cfg.epsilon(cell.n);
  auto edges = build_edges(cloud, cfg.metric, eps);
  if (cfg.graph == GraphKind::gamma_m) {
    auto g = gamma_m_from_edges(cell.n, mfd.dim(), eps, mfd.total_volume(), std::move(edges));
    return {std::move(cloud), eps, std::move(g)};
  }
  auto g = gamma_N_from_edges(cell.n, mfd.dim(), eps, std::move(edges));
  return {std::move(cloud), eps, std::move(g)};
}

ReferenceSpectrum reference_from_fixture(const ManifoldModel& mfd, const DensitySpec& dens,
                                         const Fixture& fixture, int k_max) {
  ReferenceSpectrum spec(mfd, dens);
  spec.provenance.kind = Provenance::sturm_liouville;
  spec.provenance.mesh = fixture.mesh;
  spec.provenance.tolerance = fixture.tolerance;
  spec.provenance.richardson_min = fixture.richardson_min;
  spec.provenance.richardson_max = fixture.richardson_max;
  for (const auto& r : fixture.rows) {
    for (int c = 0; c < r.multiplicity; ++c) spec.modes().push_back({r.eigenvalue, r.l, r.radial, c, {}});
  }
  spec.finalize(k_max);
  if (static_cast<int>(spec.size()) < k_max + 1) {
    throw ConfigError("fixture " + fixture.name + " holds fewer than " + std::to_string(k_max + 1) +
                      " eigenvalues");
  }
  return spec;
}

ReferenceSpectrum reference_for(const ExperimentConfig& cfg, int k_max) {
  const auto mfd = cfg.make_manifold();
  const auto dens = cfg.make_density(mfd);
  if (!cfg.reference_fixture.empty()) {
    return reference_from_fixture(mfd, dens, read_fixture_file(cfg.reference_fixture), k_max);
  }
  const bool uniform = dens.kind == DensityKind::uniform;
  switch (mfd.kind()) {
    case ManifoldKind::circle:
      if (uniform) return circle_spectrum(mfd.radius(), k_max);
      return weighted_circle_spectrum(mfd.radius(), dens, k_max, cfg.reference_mesh,
                                      cfg.graph == GraphKind::gamma_m ? WeightedTarget::unnormalized
                                                                      : WeightedTarget::random_walk);
    case ManifoldKind::sphere: return sphere_spectrum(mfd.dim(), mfd.radius(), k_max);
    case ManifoldKind::flat_torus: return flat_torus_spectrum(mfd.periods(), k_max);
    case ManifoldKind::spindle:
      return spindle_spectrum(mfd.dim(), mfd.warp(), cfg.reference_l_max, k_max, cfg.reference_mesh);
  }
  throw ConfigError("no reference spectrum for " + mfd.tag());
}

namespace {

/// Eigenpairs of a cell graph; nullopt-like empty result when the graph is disconnected.
bool solve_cell(const WeightedGraph& g, int k_max, SpectralResult& out) {
  if (g.degenerate() || !g.connected()) return false;
  out = eigen_decompose(g, std::min<int>(k_max, static_cast<int>(g.n_vertices()) - 1));
  return true;
}

}  // namespace

std::vector<SpectrumRow> run_spectrum_experiment(const ExperimentConfig& cfg) {
  const auto reference = reference_for(cfg, cfg.k_max);
  const int m = cfg.make_manifold().dim();
  const auto cells = sweep_cells(cfg);
  std::vector<std::vector<SpectrumRow>> slots(cells.size());
  parallel_for(cells.size(), cfg.threads, [&](std::size_t c) {
    const auto cg = build_cell(cfg, cells[c]);
    SpectralResult spec;
    const bool ok = solve_cell(cg.graph, cfg.k_max, spec);
    for (int k = 0; k <= cfg.k_max; ++k) {
      SpectrumRow row;
      row.n = cells[c].n;
      row.seed = cells[c].seed;
      row.eps = cg.eps;
      row.k = k;
      row.n_edges = cg.graph.n_edges();
      row.reference = reference.eigenvalue(static_cast<std::size_t>(k));
      row.connected = ok;
      if (!ok || k >= spec.count()) {
        row.lambda = row.scaled = row.abs_error = row.rel_error = std::nan("");
        row.cluster = -1;
      } else {
        row.lambda = spec.eigenvalues[k];
        row.scaled = eigenvalue_estimate(spec, k, m);
        row.abs_error = std::fabs(row.scaled - row.reference);
        row.rel_error = row.reference > 0.0 ? row.abs_error / row.reference : row.abs_error;
        row.cluster = spec.cluster_ids[static_cast<std::size_t>(k)];
      }
      slots[c].push_back(row);
    }
  });
  std::vector<SpectrumRow> out;
  for (auto& s : slots) out.insert(out.end(), s.begin(), s.end());
  return out;
}

CsvTable spectrum_table(const std::vector<SpectrumRow>& rows) {
  CsvTable t({"n", "seed", "eps", "k", "lambda", "scaled", "reference", "abs_error", "rel_error", "cluster",
              "connected", "n_edges"});
  for (const auto& r : rows) {
    t.add(r.n).add(r.seed, true).add(r.eps).add(r.k).add(r.lambda).add(r.scaled).add(r.reference);
    t.add(r.abs_error).add(r.rel_error).add(r.cluster).add(r.connected).add(r.n_edges);
    t.end_row();
  }
  return t;
}

Eigen::MatrixXd procrustes_rotation(const Eigen::MatrixXd& cross_gram) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cross_gram, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

std::pair<double, double> spectral_gap_and_width(const ReferenceSpectrum& reference, int k, int l) {
  if (k < 0 || l < k || static_cast<std::size_t>(l + 1) >= reference.size()) {
    throw DomainError("spectral_gap_and_width: reference spectrum must reach index l + 1");
  }
  const auto lam = [&](int i) { return reference.eigenvalue(static_cast<std::size_t>(i)); };
  double gap = std::min(lam(l + 1) - lam(l), 1.0);
  if (k > 0) gap = std::min(gap, lam(k) - lam(k - 1));
  return {0.5 * gap, lam(l) - lam(k)};
}

AlignmentReport align_eigenspaces(const WeightedGraph& g, const SpectralResult& spectral,
                                  const ReferenceSpectrum& reference, const PointCloud& cloud, int k, int l) {
  if (k < 0 || l < k) throw DomainError("align_eigenspaces: need 0 <= k <= l");
  const auto clusters = reference.clusters();
  const bool starts = std::any_of(clusters.begin(), clusters.end(), [k](const auto& c) { return c.first == k; });
  const bool ends = std::any_of(clusters.begin(), clusters.end(), [l](const auto& c) { return c.second == l; });
  if (!starts || !ends || l >= spectral.count() || static_cast<std::size_t>(l + 1) >= reference.size()) {
    std::ostringstream msg;
    msg << "align_eigenspaces: cluster [" << k << "," << l << "] does not match; reference multiplicities [";
    const auto mult = reference.multiplicities();
    for (std::size_t i = 0; i < mult.size(); ++i) msg << (i ? "," : "") << mult[i];
    msg << "], graph eigenvalues [";
    for (int i = 0; i < spectral.count(); ++i) msg << (i ? "," : "") << spectral.eigenvalues[i];
    msg << "]";
    throw DomainError(msg.str());
  }
  for (int j = k; j <= l; ++j) {
    if (!reference.modes()[static_cast<std::size_t>(j)].f) {
      throw DomainError("align_eigenspaces: reference eigenfunction " + std::to_string(j) + " has no evaluator");
    }
  }
  const int d = l - k + 1;
  const auto n = static_cast<Eigen::Index>(g.n_vertices());
  const Eigen::Map<const Eigen::VectorXd> w(g.w_V().data(), n);
  const Eigen::MatrixXd phi = spectral.eigenvectors.middleCols(k, d);
  const auto& mfd = reference.manifold();
  const auto& dens = reference.density();
  const int power = g.kind() == GraphKind::gamma_m ? 1 : 2;

  Eigen::MatrixXd F(n, d);
  for (int j = 0; j < d; ++j) {
    const auto& f = reference.modes()[static_cast<std::size_t>(k + j)].f;
    Xoshiro256 rng(derive_seed(0xa11a, static_cast<std::uint64_t>(k + j)));
    const double norm2 = integrate_over(
        mfd, [&](const Point& p) { return f(p) * f(p) * std::pow(dens(mfd, p), power); }, &rng);
    F.col(j) = discretize(f, cloud) / std::sqrt(norm2);
  }
  const Eigen::MatrixXd coeff = phi.transpose() * w.asDiagonal() * F;  // d x d
  const Eigen::MatrixXd rotation = procrustes_rotation(coeff.transpose());
  const Eigen::MatrixXd aligned = F * rotation;

  AlignmentReport rep;
  rep.n = g.n_vertices();
  rep.eps = g.epsilon();
  rep.k = k;
  rep.l = l;
  std::tie(rep.gamma, rep.s) = spectral_gap_and_width(reference, k, l);
  rep.rotation = rotation;
  auto wnorm = [&](const Eigen::VectorXd& v) { return std::sqrt(v.cwiseProduct(v).dot(w)); };
  double num = 0.0;
  double den = 0.0;
  for (int j = 0; j < d; ++j) {
    AlignmentFunctionRow row;
    row.j = k + j;
    row.norm = wnorm(F.col(j));
    row.projection_residual = wnorm(F.col(j) - phi * coeff.col(j));
    row.relative_residual = row.norm > 0.0 ? row.projection_residual / row.norm : 0.0;
    row.norm_defect = std::fabs(1.0 - coeff.col(j).norm());
    const Eigen::VectorXd diff = aligned.col(j) - phi.col(j);
    row.aligned_residual = wnorm(diff);
    row.literal_residual = diff.cwiseProduct(diff).dot(w) / static_cast<double>(n);
    num += row.projection_residual * row.projection_residual;
    den += row.norm * row.norm;
    rep.max_relative_residual = std::max(rep.max_relative_residual, row.relative_residual);
    rep.functions.push_back(row);
  }
  rep.subspace_residual = den > 0.0 ? std::sqrt(num / den) : 0.0;
  return rep;
}

std::vector<AlignmentReport> run_alignment(const ExperimentConfig& cfg) {
  const int need = std::max(cfg.k_max, cfg.align_l + 1);
  const auto reference = reference_for(cfg, need + 1);
  const auto cells = sweep_cells(cfg);
  std::vector<AlignmentReport> out(cells.size());
  std::vector<char> ok(cells.size(), 0);
  parallel_for(cells.size(), cfg.threads, [&](std::size_t c) {
    const auto cg = build_cell(cfg, cells[c]);
    SpectralResult spec;
    if (!solve_cell(cg.graph, need, spec)) return;
    out[c] = align_eigenspaces(cg.graph, spec, reference, cg.cloud, cfg.align_k, cfg.align_l);
    out[c].seed = cells[c].seed;
    ok[c] = 1;
  });
  std::vector<AlignmentReport> kept;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (ok[c]) {
      kept.push_back(std::move(out[c]));
    } else {
      AlignmentReport r;
      r.n = cells[c].n;
      r.seed = cells[c].seed;
      r.k = cfg.align_k;
      r.l = cfg.align_l;
      r.subspace_residual = r.max_relative_residual = std::nan("");
      kept.push_back(std::move(r));
    }
  }
  return kept;
}

CsvTable alignment_table(const std::vector<AlignmentReport>& reports) {
  CsvTable t({"n", "seed", "eps", "k", "l", "j", "gamma", "s", "norm", "projection_residual",
              "relative_residual", "norm_defect", "aligned_residual", "literal_residual", "subspace_residual"});
  for (const auto& r : reports) {
    if (r.functions.empty()) {
      const double nan = std::nan("");
      t.add(r.n).add(r.seed, true).add(r.eps).add(r.k).add(r.l).add(-1).add(nan).add(nan).add(nan);
      t.add(nan).add(nan).add(nan).add(nan).add(nan).add(nan);
      t.end_row();
      continue;
    }
    for (const auto& f : r.functions) {
      t.add(r.n).add(r.seed, true).add(r.eps).add(r.k).add(r.l).add(f.j).add(r.gamma).add(r.s).add(f.norm);
      t.add(f.projection_residual).add(f.relative_residual).add(f.norm_defect).add(f.aligned_residual);
      t.add(f.literal_residual).add(r.subspace_residual);
      t.end_row();
    }
  }
  return t;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::nan("");
  std::sort(values.begin(), values.end());
  const std::size_t h = values.size() / 2;
  return values.size() % 2 == 1 ? values[h] : 0.5 * (values[h - 1] + values[h]);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(y[i])) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  if (lx.size() < 2) return std::nan("");
  const double n = static_cast<double>(lx.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / n;
    my += ly[i] / n;
  }
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : std::nan("");
}

std::vector<SweepSummaryRow> summarize_sweep(const std::vector<SpectrumRow>& rows) {
  std::map<std::pair<int, std::size_t>, std::vector<const SpectrumRow*>> groups;
  for (const auto& r : rows) groups[{r.k, r.n}].push_back(&r);
  std::vector<SweepSummaryRow> out;
  std::map<int, std::pair<std::vector<double>, std::vector<double>>> per_k;
  for (const auto& [key, members] : groups) {
    SweepSummaryRow s;
    s.k = key.first;
    s.n = key.second;
    std::vector<double> abs_err;
    std::vector<double> rel_err;
    for (const auto* r : members) {
      if (!r->connected || !std::isfinite(r->abs_error)) {
        ++s.excluded;
        continue;
      }
      abs_err.push_back(r->abs_error);
      rel_err.push_back(r->rel_error);
    }
    s.cells = abs_err.size();
    s.median_abs_error = median(abs_err);
    s.median_rel_error = median(rel_err);
    per_k[s.k].first.push_back(static_cast<double>(s.n));
    per_k[s.k].second.push_back(s.median_abs_error);
    out.push_back(s);
  }
  for (auto& s : out) s.slope = loglog_slope(per_k[s.k].first, per_k[s.k].second);
  return out;
}

CsvTable sweep_table(const std::vector<SweepSummaryRow>& rows) {
  CsvTable t({"k", "n", "median_abs_error", "median_rel_error", "cells", "excluded", "slope"});
  for (const auto& r : rows) {
    t.add(r.k).add(r.n).add(r.median_abs_error).add(r.median_rel_error).add(r.cells).add(r.excluded).add(r.slope);
    t.end_row();
  }
  return t;
}

std::string sweep_svg(const std::vector<SweepSummaryRow>& rows) {
  constexpr double W = 640.0;
  constexpr double H = 420.0;
  constexpr double L = 70.0;
  constexpr double R = 130.0;
  constexpr double T = 30.0;
  constexpr double B = 50.0;
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
  std::map<int, std::vector<std::pair<double, double>>> lines;
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& r : rows) {
    if (r.k < 1 || !(r.median_abs_error > 0.0) || !std::isfinite(r.median_abs_error)) continue;
    const double x = std::log10(static_cast<double>(r.n));
    const double y = std::log10(r.median_abs_error);
    lines[r.k].emplace_back(x, y);
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  }
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (lines.empty()) {
    os << "<text x=\"20\" y=\"40\">no finite errors</text>\n</svg>\n";
    return os.str();
  }
  if (x1 - x0 < 1e-9) {
    x0 -= 0.5;
    x1 += 0.5;
  }
  if (y1 - y0 < 1e-9) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">log10 n</text>\n";
  os << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" transform=\"rotate(-90 16 " << (T + H - B) / 2
     << ")\" text-anchor=\"middle\">log10 median |(m+2) lambda_k - lambda_k(ref)|</text>\n";
  for (double v : {x0, x1}) {
    os << "<text x=\"" << px(v) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\" font-size=\"11\">"
       << format_number(std::round(v * 100.0) / 100.0) << "</text>\n";
  }
  for (double v : {y0, y1}) {
    os << "<text x=\"" << L - 6 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
       << format_number(std::round(v * 100.0) / 100.0) << "</text>\n";
  }
  int idx = 0;
  for (const auto& [k, pts] : lines) {
    const char* color = palette[idx % 7];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : pts) os << px(x) << ',' << py(y) << ' ';
    os << "\"/>\n";
    const double ly = T + 18.0 * idx;
    os << "<line x1=\"" << W - R + 15 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 40 << "\" y2=\"" << ly
       << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << W - R + 46 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">k = " << k << "</text>\n";
    ++idx;
  }
  os << "</svg>\n";
  return os.str();
}

ConvergenceSweep run_convergence_sweep(const ExperimentConfig& cfg) {
  if (cfg.n.size() < 3 || cfg.seeds.size() < 3) {
    throw ConfigError("convergence sweep needs at least three n values and three seeds");
  }
  ConvergenceSweep sweep;
  sweep.cells = run_spectrum_experiment(cfg);
  sweep.summary = summarize_sweep(sweep.cells);
  return sweep;
}

std::vector<RegularityRow> run_regularity(const ExperimentConfig& cfg) {
  const auto cells = sweep_cells(cfg);
  std::vector<RegularityRow> out(cells.size());
  parallel_for(cells.size(), cfg.threads, [&](std::size_t c) {
    const auto cg = build_cell(cfg, cells[c]);
    RegularityOptions opts;
    opts.sigma = cfg.sigma;
    if (cfg.centers > 0) opts.centers.count = cfg.centers;
    opts.centers.seed = cells[c].seed;
    opts.max_exact_ball = cfg.max_exact_ball;
    opts.k_max = std::min(cfg.k_max, 5);
    opts.moser_p = cfg.moser_p;
    SpectralResult spec;
    if (!solve_cell(cg.graph, opts.k_max, spec)) {
      throw GraphError("regularity: graph for n=" + std::to_string(cells[c].n) + " seed=" +
                       std::to_string(cells[c].seed) + " is disconnected");
    }
    out[c].seed = cells[c].seed;
    out[c].certificate = certify_regularity(cg.graph, spec, opts);
  });
  return out;
}

CsvTable regularity_table(const std::vector<RegularityRow>& rows) {
  CsvTable t({"n", "seed", "eps", "Q", "P", "P_sharp", "sigma", "R", "nu", "poincare_approximate",
              "poincare_infinite", "diameter", "alpha", "moser_p2", "moser_p4", "moser_p8", "moser_pinf"});
  for (const auto& r : rows) {
    const auto& c = r.certificate;
    t.add(c.n).add(r.seed, true).add(c.eps).add(c.Q).add(c.P).add(c.P_sharp).add(c.sigma).add(c.R).add(c.nu);
    t.add(c.poincare_approximate).add(c.poincare_infinite).add(c.diameter).add(c.alpha);
    for (double p : {2.0, 4.0, 8.0, kInfinity}) t.add(c.moser_max(p));
    t.end_row();
  }
  return t;
}

std::vector<DistortionRow> run_distortion(const ExperimentConfig& cfg) {
  const auto mfd = cfg.make_manifold();
  const int m = mfd.dim();
  const double p = cfg.distortion_p > 0.0 ? cfg.distortion_p : m + 2.0;
  const auto cells = sweep_cells(cfg);
  std::vector<DistortionRow> out(cells.size());
  parallel_for(cells.size(), cfg.threads, [&](std::size_t c) {
    DistortionRow& row = out[c];
    row.n = cells[c].n;
    row.seed = cells[c].seed;
    auto& est = row.estimate;
    est.p = p;
    est.eps = cfg.epsilon(cells[c].n);
    est.K = cfg.distortion_K;
    est.n_mc = cfg.distortion_n_mc;
    est.n_outer = cfg.distortion_n_outer;
    est.n_inner = cfg.distortion_n_inner;
    est.seed = cells[c].seed;
    est.v_p_eps = v_p_eps(mfd, p, est.eps, est.K, est.n_mc, derive_seed(cells[c].seed, 1));
    row.v_m2 = p == m + 2.0 ? est.v_p_eps
                            : v_p_eps(mfd, m + 2.0, est.eps, est.K, est.n_mc, derive_seed(cells[c].seed, 1));
    est.s_eps = s_eps(mfd, MetricPair::geodesic_embedded, est.eps, est.n_outer, est.n_inner,
                      derive_seed(cells[c].seed, 2));
    row.terms = theorem_error_terms(m, est.eps, row.v_m2.value, est.s_eps.value);
  });
  return out;
}

CsvTable distortion_table(const std::vector<DistortionRow>& rows) {
  CsvTable t({"n", "seed", "eps", "p", "K", "V_p", "V_p_std_error", "V_m2", "S_eps", "S_eps_std_error", "n_mc",
              "n_outer", "n_inner", "term_eps", "term_V", "term_S"});
  for (const auto& r : rows) {
    const auto& e = r.estimate;
    t.add(r.n).add(r.seed, true).add(e.eps).add(e.p).add(e.K).add(e.v_p_eps.value).add(e.v_p_eps.std_error);
    t.add(r.v_m2.value).add(e.s_eps.value).add(e.s_eps.std_error).add(e.n_mc).add(e.n_outer).add(e.n_inner);
    t.add(r.terms.t1).add(r.terms.t2).add(r.terms.t3);
    t.end_row();
  }
  return t;
}

std::vector<EnergyRow> run_energy(const ExperimentConfig& cfg) {
  const auto mfd = cfg.make_manifold();
  const auto dens = cfg.make_density(mfd);
  const auto f = standard_test_function(mfd);
  const auto cells = sweep_cells(cfg);
  std::vector<EnergyRow> out(cells.size());
  parallel_for(cells.size(), cfg.threads, [&](std::size_t c) {
    const auto cloud = sample_dataset(mfd, dens, cells[c].n, cells[c].seed);
    auto& row = out[c];
    row.n = cells[c].n;
    row.seed = cells[c].seed;
    row.eps = cfg.epsilon(cells[c].n);
    row.function = f.name;
    row.energy = energy_comparison_report(mfd, dens, cloud, row.eps, f);
    row.l2 = l2_norm_comparison_report(mfd, dens, cloud, row.eps, f.f);
  });
  return out;
}

CsvTable energy_table(const std::vector<EnergyRow>& rows) {
  CsvTable t({"n", "seed", "eps", "function", "discrete_energy", "continuous_energy", "difference",
              "continuous_std_error", "l2_discrete_mean", "l2_discrete_mean_std_error", "l2_continuous_mean",
              "l2_discrete_degree", "l2_continuous_degree"});
  for (const auto& r : rows) {
    t.add(r.n).add(r.seed, true).add(r.eps).add(r.function).add(r.energy.discrete).add(r.energy.continuous);
    t.add(r.energy.difference).add(r.energy.continuous_std_error).add(r.l2.discrete_mean);
    t.add(r.l2.discrete_mean_std_error).add(r.l2.continuous_mean).add(r.l2.discrete_degree);
    t.add(r.l2.continuous_degree);
    t.end_row();
  }
  return t;
}

std::vector<MoserRunRow> run_moser(const ExperimentConfig& cfg) {
  const auto cells = sweep_cells(cfg);
  std::vector<std::vector<MoserRunRow>> slots(cells.size());
  parallel_for(cells.size(), cfg.threads, [&](std::size_t c) {
    const auto cg = build_cell(cfg, cells[c]);
    SpectralResult spec;
    if (!solve_cell(cg.graph, cfg.k_max, spec)) {
      throw GraphError("moser: graph for n=" + std::to_string(cells[c].n) + " seed=" +
                       std::to_string(cells[c].seed) + " is disconnected");
    }
    const double alpha = moser_alpha(cg.graph);
    const double D = graph_diameter(cg.graph);
    for (int k = 1; k < spec.count(); ++k) {
      for (double p : cfg.moser_p) {
        slots[c].push_back({cells[c].n, cells[c].seed, cg.eps, k, p, moser_check(cg.graph, spec, k, p, alpha, D)});
      }
    }
  });
  std::vector<MoserRunRow> out;
  for (auto& s : slots) out.insert(out.end(), s.begin(), s.end());
  return out;
}

CsvTable moser_table(const std::vector<MoserRunRow>& rows) {
  CsvTable t({"n", "seed", "eps", "k", "p", "lambda", "ratio", "bound_shape", "normalized"});
  for (const auto& r : rows) {
    t.add(r.n).add(r.seed, true).add(r.eps).add(r.k).add(r.p).add(r.check.lambda).add(r.check.ratio);
    t.add(r.check.bound_shape).add(r.check.normalized());
    t.end_row();
  }
  return t;
}

}  // namespace spectral_limits
