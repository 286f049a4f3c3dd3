#include "spectral_limits/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include <Eigen/Sparse>

#include "spectral_limits/errors.hpp"
#include "spectral_limits/report_io.hpp"

namespace spectral_limits {

namespace {

// Largest hop count h with h * eps < r.
int hop_limit(double r, double eps) {
  return std::max(0, static_cast<int>(std::ceil(r / eps)) - 1);
}

std::vector<Index> within(const std::vector<int>& hops, int h) {
  std::vector<Index> out;
  for (Index v = 0; v < hops.size(); ++v) {
    if (hops[v] >= 0 && hops[v] <= h) out.push_back(v);
  }
  return out;
}

std::vector<Index> all_vertices(const WeightedGraph& g) {
  std::vector<Index> v(g.n_vertices());
  std::iota(v.begin(), v.end(), Index{0});
  return v;
}

double variance_on(const WeightedGraph& g, const GraphFunction& phi, std::span<const Index> B) {
  const double vol = graph_volume(g, B);
  double mean = 0.0;
  for (Index v : B) mean += phi[v] * g.w_V()[v];
  mean /= vol;
  double s = 0.0;
  for (Index v : B) s += (phi[v] - mean) * (phi[v] - mean) * g.w_V()[v];
  return s / vol;
}

// Exact sharp Poincare ratio for B = {hops <= k}, sigma B = {hops <= h_sigma}.
double exact_ball_ratio(const WeightedGraph& g, const std::vector<int>& hops, Index center,
                        const std::vector<Index>& B, const std::vector<Index>& SB, double r) {
  const double volB = graph_volume(g, B);
  if (B.size() < 2 || !(volB > 0.0)) return 0.0;
  const double volSB = graph_volume(g, SB);
  const std::size_t n = g.n_vertices();
  std::vector<int> local(n, -1);
  for (std::size_t i = 0; i < SB.size(); ++i) local[SB[i]] = static_cast<int>(i);
  auto inside = [&](Index v) { return hops[v] >= 0 && local[v] >= 0; };

  // components of the sigma-ball with positively weighted edges
  std::vector<int> comp(SB.size(), -1);
  int n_comp = 0;
  std::vector<Index> stack;
  for (std::size_t s = 0; s < SB.size(); ++s) {
    if (comp[s] >= 0) continue;
    comp[s] = n_comp;
    stack.push_back(SB[s]);
    while (!stack.empty()) {
      const Index v = stack.back();
      stack.pop_back();
      const auto nb = g.neighbors(v);
      const auto ed = g.incident_edges(v);
      for (std::size_t t = 0; t < nb.size(); ++t) {
        const Index w = nb[t];
        if (!inside(w) || !(g.w_E()[ed[t]] > 0.0)) continue;
        auto& c = comp[static_cast<std::size_t>(local[w])];
        if (c < 0) {
          c = n_comp;
          stack.push_back(w);
        }
      }
    }
    ++n_comp;
  }
  const int home = comp[static_cast<std::size_t>(local[center])];
  for (Index v : B) {
    if (comp[static_cast<std::size_t>(local[v])] != home) return kInfinity;
  }

  // unknowns: vertices of the home component except the grounded center
  std::vector<int> unknown(SB.size(), -1);
  int n_unknown = 0;
  for (std::size_t i = 0; i < SB.size(); ++i) {
    if (comp[i] == home && SB[i] != center) unknown[i] = n_unknown++;
  }
  const double eps = g.epsilon();
  const double scale = 2.0 * r * r / (eps * eps * volSB);
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t i = 0; i < SB.size(); ++i) {
    if (comp[i] != home) continue;
    const Index v = SB[i];
    const auto nb = g.neighbors(v);
    const auto ed = g.incident_edges(v);
    for (std::size_t t = 0; t < nb.size(); ++t) {
      const Index w = nb[t];
      if (w < v || !inside(w)) continue;
      const double q = scale * g.w_E()[ed[t]];
      if (!(q > 0.0)) continue;
      const int a = unknown[i];
      const int b = unknown[static_cast<std::size_t>(local[w])];
      if (a >= 0) trip.emplace_back(a, a, q);
      if (b >= 0) trip.emplace_back(b, b, q);
      if (a >= 0 && b >= 0) {
        trip.emplace_back(a, b, -q);
        trip.emplace_back(b, a, -q);
      }
    }
  }
  Eigen::SparseMatrix<double> E(n_unknown, n_unknown);
  E.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(E);
  if (ldlt.info() != Eigen::Success) throw SolverError("poincare: Dirichlet form factorization failed");

  const auto nb_ = static_cast<Eigen::Index>(B.size());
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n_unknown, nb_);
  for (Eigen::Index j = 0; j < nb_; ++j) {
    const int u = unknown[static_cast<std::size_t>(local[B[static_cast<std::size_t>(j)]])];
    if (u >= 0) rhs(u, j) = 1.0;
  }
  const Eigen::MatrixXd X = ldlt.solve(rhs);
  Eigen::MatrixXd Minv = Eigen::MatrixXd::Zero(nb_, nb_);
  for (Eigen::Index j = 0; j < nb_; ++j) {
    const int u = unknown[static_cast<std::size_t>(local[B[static_cast<std::size_t>(j)]])];
    if (u < 0) continue;
    for (Eigen::Index i = 0; i < nb_; ++i) {
      const int ui = unknown[static_cast<std::size_t>(local[B[static_cast<std::size_t>(i)]])];
      if (ui >= 0) Minv(i, j) = X(ui, j);
    }
  }
  // variance form = G G^T with G = vol_B^{-1/2} W^{1/2} (I - u u^T)
  Eigen::VectorXd sw(nb_);
  for (Eigen::Index i = 0; i < nb_; ++i) sw[i] = std::sqrt(g.w_V()[B[static_cast<std::size_t>(i)]]);
  const Eigen::VectorXd u = sw / std::sqrt(volB);
  Eigen::MatrixXd G = -u * u.transpose();
  G.diagonal().array() += 1.0;
  G = sw.asDiagonal() * G / std::sqrt(volB);
  const Eigen::MatrixXd K = G.transpose() * Minv * G;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (K + K.transpose()), Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
}

double test_function_ratio(const WeightedGraph& g, const SpectralResult& tf,
                           const std::vector<Index>& B, const std::vector<Index>& SB, double r) {
  double best = 0.0;
  for (int k = 1; k < tf.count(); ++k) {
    const GraphFunction phi = tf.eigenvector(k);
    const double var = variance_on(g, phi, B);
    const double grad = gradient_norm(g, phi, SB);
    if (!(var > 0.0)) continue;
    if (!(grad > 0.0)) return kInfinity;
    best = std::max(best, std::sqrt(var) / (r * grad));
  }
  return best;
}

}  // namespace

double weighted_p_norm(const WeightedGraph& g, const GraphFunction& phi, double p,
                       std::span<const Index> subset) {
  if (!(p >= 1.0)) throw DomainError("weighted_p_norm: p must be >= 1");
  if (subset.empty()) throw DomainError("weighted_p_norm: empty subset");
  const double vol = graph_volume(g, subset);
  if (!(vol > 0.0)) throw DomainError("weighted_p_norm: subset has zero volume");
  if (std::isinf(p)) {
    double m = 0.0;
    for (Index v : subset) m = std::max(m, std::fabs(phi[v]));
    return m;
  }
  double s = 0.0;
  for (Index v : subset) s += std::pow(std::fabs(phi[v]), p) * g.w_V()[v];
  return std::pow(s / vol, 1.0 / p);
}

double weighted_p_norm(const WeightedGraph& g, const GraphFunction& phi, double p) {
  const auto all = all_vertices(g);
  return weighted_p_norm(g, phi, p, all);
}

double gradient_norm(const WeightedGraph& g, const GraphFunction& phi,
                     std::span<const Index> subset) {
  const double vol = graph_volume(g, subset);
  if (!(vol > 0.0)) throw DomainError("gradient_norm: subset has zero volume");
  std::vector<char> in(g.n_vertices(), 0);
  for (Index v : subset) in[v] = 1;
  const double inv = 1.0 / g.epsilon();
  double s = 0.0;
  for (std::size_t k = 0; k < g.n_edges(); ++k) {
    const auto [a, b] = g.edges()[k];
    if (!in[a] || !in[b]) continue;
    const double d = (phi[a] - phi[b]) * inv;
    s += 2.0 * d * d * g.w_E()[k];
  }
  return std::sqrt(s / vol);
}

double gradient_norm(const WeightedGraph& g, const GraphFunction& phi) {
  return std::sqrt(dirichlet_energy(g, phi) / graph_volume(g));
}

GraphFunction ball_average(const WeightedGraph& g, const GraphFunction& phi, double s) {
  if (!(s > 0.0)) throw DomainError("ball_average: s must be positive");
  const int h = hop_limit(s, g.epsilon());
  GraphFunction out(phi.size());
  for (Index x = 0; x < g.n_vertices(); ++x) {
    const auto hops = bfs_hops(g, x, h);
    double num = 0.0;
    double vol = 0.0;
    for (Index y = 0; y < g.n_vertices(); ++y) {
      if (hops[y] >= 0 && hops[y] <= h) {
        num += phi[y] * g.w_V()[y];
        vol += g.w_V()[y];
      }
    }
    if (!(vol > 0.0)) throw DomainError("ball_average: ball around vertex " + std::to_string(x) + " has zero volume");
    out[x] = num / vol;
  }
  return out;
}

std::vector<Index> CenterSample::select(std::size_t n) const {
  std::size_t want = count.value_or(n <= exhaustive_limit ? n : default_count);
  std::vector<Index> all(n);
  std::iota(all.begin(), all.end(), Index{0});
  if (want >= n) return all;
  Xoshiro256 rng(seed);
  for (std::size_t i = 0; i < want; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(all[i], all[j]);
  }
  all.resize(want);
  std::sort(all.begin(), all.end());
  return all;
}

DoublingResult doubling_constant(const WeightedGraph& g, const CenterSample& centers) {
  DoublingResult res;
  res.centers = centers.select(g.n_vertices());
  const double eps = g.epsilon();
  for (Index x : res.centers) {
    const auto hops = bfs_hops(g, x);
    const int ecc = *std::max_element(hops.begin(), hops.end());
    std::vector<double> cum(static_cast<std::size_t>(ecc) + 1, 0.0);
    for (Index v = 0; v < hops.size(); ++v) {
      if (hops[v] >= 0) cum[static_cast<std::size_t>(hops[v])] += g.w_V()[v];
    }
    for (std::size_t h = 1; h < cum.size(); ++h) cum[h] += cum[h - 1];
    auto vol_upto = [&](int h) { return cum[static_cast<std::size_t>(std::min(h, ecc))]; };
    for (int k = 1; k <= std::max(ecc, 1); ++k) {
      const double small = vol_upto(k);
      if (!(small > 0.0)) continue;
      const double q = vol_upto(2 * k + 1) / small;
      if (q > res.Q) {
        res.Q = q;
        res.worst_center = x;
        res.worst_radius = (k + 1) * eps;
      }
    }
  }
  return res;
}

double poincare_ball_ratio(const WeightedGraph& g, Index center, double r, double sigma) {
  if (!(sigma >= 1.0)) throw DomainError("poincare: sigma must be >= 1");
  if (!(r > 0.0)) throw DomainError("poincare: r must be positive");
  const int hs = hop_limit(sigma * r, g.epsilon());
  const auto hops = bfs_hops(g, center, hs);
  const auto B = within(hops, hop_limit(r, g.epsilon()));
  const auto SB = within(hops, hs);
  return exact_ball_ratio(g, hops, center, B, SB, r);
}

PoincareResult poincare_constant(const WeightedGraph& g, const PoincareOptions& opts) {
  if (!(opts.sigma >= 1.0)) throw DomainError("poincare: sigma must be >= 1");
  PoincareResult res;
  res.sigma = opts.sigma;
  res.centers = opts.centers.select(g.n_vertices());
  const double eps = g.epsilon();

  SpectralResult owned;
  const SpectralResult* tf = opts.test_functions;
  auto test_functions = [&]() -> const SpectralResult& {
    if (tf == nullptr) {
      const int k = std::min<int>(opts.n_test_functions, static_cast<int>(g.n_vertices()) - 1);
      owned = eigen_decompose(g, k);
      tf = &owned;
    }
    return *tf;
  };

  int max_k = 0;
  for (Index x : res.centers) {
    const auto hops = bfs_hops(g, x);
    const int ecc = *std::max_element(hops.begin(), hops.end());
    for (int k = 1; k <= std::max(ecc, 1); ++k) {
      const double r = (k + 0.5) * eps;
      const auto B = within(hops, k);
      const auto SB = within(hops, hop_limit(opts.sigma * r, eps));
      double ratio = 0.0;
      ++res.balls_evaluated;
      if (SB.size() > opts.max_exact_ball) {
        ratio = test_function_ratio(g, test_functions(), B, SB, r);
        ++res.balls_approximate;
        res.approximate = true;
      } else {
        ratio = exact_ball_ratio(g, hops, x, B, SB, r);
      }
      max_k = std::max(max_k, k);
      if (ratio > res.sharp) {
        res.sharp = ratio;
        res.worst_center = x;
        res.worst_radius = r;
      }
      if (k >= ecc) break;
    }
  }
  for (int k = 1; k <= max_k; ++k) res.radii.push_back((k + 0.5) * eps);
  res.infinite = std::isinf(res.sharp);
  res.P = std::max(1.0, res.sharp);
  return res;
}

double almost_regularity(const WeightedGraph& g) {
  double R = 1.0;
  const auto& wv = g.w_V();
  for (const auto& [x, y] : g.edges()) {
    const double a = wv[x];
    const double b = wv[y];
    if (a > 0.0 && b > 0.0) R = std::max(R, std::max(a / b, b / a));
    else if (a != b) R = kInfinity;
    const double dx = g.degree(x);
    const double dy = g.degree(y);
    R = std::max(R, std::max(dx / dy, dy / dx));
  }
  for (Index x = 0; x < g.n_vertices(); ++x) {
    const auto ed = g.incident_edges(x);
    if (ed.size() < 2) continue;
    double lo = kInfinity;
    double hi = 0.0;
    for (Index e : ed) {
      lo = std::min(lo, g.w_E()[e]);
      hi = std::max(hi, g.w_E()[e]);
    }
    if (hi > 0.0) R = std::max(R, lo > 0.0 ? hi / lo : kInfinity);
  }
  return R;
}

GraphFunction smoothing_apply(const WeightedGraph& g, const GraphFunction& phi) {
  GraphFunction out(phi.size());
  for (Index x = 0; x < g.n_vertices(); ++x) {
    const auto nb = g.neighbors(x);
    const auto ed = g.incident_edges(x);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t t = 0; t < nb.size(); ++t) {
      num += g.w_E()[ed[t]] * phi[nb[t]];
      den += g.w_E()[ed[t]];
    }
    if (!(den > 0.0)) {
      throw GraphError("smoothing_apply: vertex " + std::to_string(x) + " has no weighted edge");
    }
    out[x] = num / den;
  }
  return out;
}

NashDiagnostic nash_diagnostic(const WeightedGraph& g, const GraphFunction& phi, double D, double nu) {
  if (!(nu >= 0.0)) throw DomainError("nash_diagnostic: nu must be nonnegative");
  NashDiagnostic out;
  out.l1 = weighted_p_norm(g, phi, 1.0);
  if (!(out.l1 > 0.0)) throw DomainError("nash_diagnostic: phi must be nonzero");
  out.lhs = std::min(weighted_p_norm(g, phi, 2.0), weighted_p_norm(g, smoothing_apply(g, phi), 2.0));
  out.gradient = gradient_norm(g, phi);
  // (C (D G)^b + a^b) a^{2/(nu+2)} = C (D G)^b a^{2/(nu+2)} + a
  const double excess = out.lhs - out.l1;
  if (excess <= 1e-14 * out.l1) return out;
  const double b = nu / (nu + 2.0);
  const double denom = std::pow(D * out.gradient, b) * std::pow(out.l1, 2.0 / (nu + 2.0));
  if (!(denom > 0.0)) {
    out.C = kInfinity;
    out.infinite = true;
    return out;
  }
  out.C = excess / denom;
  return out;
}

double moser_alpha(const WeightedGraph& g) {
  double alpha = 0.0;
  for (Index x = 0; x < g.n_vertices(); ++x) {
    double s = 0.0;
    for (Index e : g.incident_edges(x)) s += g.w_E()[e];
    if (!(s > 0.0)) return kInfinity;
    alpha = std::max(alpha, g.w_V()[x] / s);
  }
  return alpha;
}

double graph_diameter(const WeightedGraph& g, std::size_t exact_limit) {
  const std::size_t n = g.n_vertices();
  int best = 0;
  auto ecc_of = [&](Index s, Index* far) {
    const auto hops = bfs_hops(g, s);
    int e = 0;
    for (Index v = 0; v < n; ++v) {
      if (hops[v] < 0) return -1;
      if (hops[v] > e) {
        e = hops[v];
        if (far != nullptr) *far = v;
      }
    }
    return e;
  };
  if (n <= exact_limit) {
    for (Index s = 0; s < n; ++s) {
      const int e = ecc_of(s, nullptr);
      if (e < 0) return kInfiniteDistance;
      best = std::max(best, e);
    }
  } else {
    CenterSample cs;
    cs.count = 8;
    cs.seed = g.hash();
    for (Index s : cs.select(n)) {
      Index far = s;
      if (ecc_of(s, &far) < 0) return kInfiniteDistance;
      best = std::max(best, ecc_of(far, nullptr));
    }
  }
  return best * g.epsilon();
}

MoserCheck moser_check(const WeightedGraph& g, const SpectralResult& spectral, int k, double p,
                       double alpha_param, double D) {
  if (k < 0 || k >= spectral.count()) throw DomainError("moser_check: eigenpair k not available");
  if (!(p >= 1.0)) throw DomainError("moser_check: p must be >= 1");
  const GraphFunction phi = spectral.eigenvector(k).cwiseAbs();
  MoserCheck out;
  out.ratio = weighted_p_norm(g, phi, p) / weighted_p_norm(g, phi, 1.0);
  out.lambda = std::max(spectral.eigenvalues[k], 1.0);
  const double eps = g.epsilon();
  const double exponent = std::isinf(p) ? 0.0 : 2.0 * out.lambda * alpha_param * eps * eps;
  // p^{...} grows without bound as p -> inf; the table reports the finite-p shape
  out.bound_shape = (std::isinf(p) ? 1.0 : std::pow(p, exponent)) * std::exp(D * std::sqrt(out.lambda));
  return out;
}

double RegularityCertificate::moser_max(double p) const {
  double best = 1.0;
  bool found = false;
  for (const auto& row : moser_table) {
    if (row.k >= 1 && row.p == p) {
      best = found ? std::max(best, row.ratio) : row.ratio;
      found = true;
    }
  }
  return best;
}

RegularityCertificate certify_regularity(const WeightedGraph& g, const SpectralResult& spectral,
                                         const RegularityOptions& opts) {
  RegularityCertificate cert;
  cert.n = g.n_vertices();
  cert.eps = g.epsilon();
  const auto dbl = doubling_constant(g, opts.centers);
  cert.Q = dbl.Q;
  cert.nu = std::log2(cert.Q);
  PoincareOptions po;
  po.sigma = opts.sigma;
  po.centers = opts.centers;
  po.max_exact_ball = opts.max_exact_ball;
  po.test_functions = &spectral;
  const auto poi = poincare_constant(g, po);
  cert.P = poi.P;
  cert.P_sharp = poi.sharp;
  cert.sigma = poi.sigma;
  cert.poincare_approximate = poi.approximate;
  cert.poincare_infinite = poi.infinite;
  cert.sampled_radii = poi.radii;
  cert.sampled_centers = poi.centers;
  cert.R = almost_regularity(g);
  cert.diameter = graph_diameter(g);
  cert.alpha = moser_alpha(g);
  const int kmax = std::min(opts.k_max, spectral.count() - 1);
  for (int k = 0; k <= kmax; ++k) {
    for (double p : opts.moser_p) {
      const auto mc = moser_check(g, spectral, k, p, cert.alpha, cert.diameter);
      cert.moser_table.push_back({k, p, mc.ratio, mc.bound_shape});
    }
  }
  return cert;
}

void write_certificate_header(std::ostream& os) {
  os << "n,eps,Q,P,P_sharp,sigma,R,nu,poincare_approximate,moser_p2,moser_p4,moser_p8,moser_pinf\n";
}

void write_certificate_row(std::ostream& os, const RegularityCertificate& cert) {
  std::string line = std::to_string(cert.n);
  for (double v : {cert.eps, cert.Q, cert.P, cert.P_sharp, cert.sigma, cert.R, cert.nu}) {
    line += ',';
    append_number(line, v);
  }
  line += cert.poincare_approximate ? ",1" : ",0";
  for (double p : {2.0, 4.0, 8.0, kInfinity}) {
    line += ',';
    append_number(line, cert.moser_max(p));
  }
  os << line << '\n';
}

}  // namespace spectral_limits
