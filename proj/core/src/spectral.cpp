#include "spectral_limits/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spectral_limits/errors.hpp"

namespace spectral_limits {

namespace {

void require_solvable(const WeightedGraph& g) {
  if (g.degenerate()) {
    std::ostringstream os;
    os << "graph has " << g.isolated_vertices().size() << " isolated vertices (first: "
       << g.isolated_vertices().front() << "); refusing to solve";
    throw GraphError(os.str());
  }
  for (Index i = 0; i < g.n_vertices(); ++i) {
    if (!(g.w_V()[i] > 0.0)) throw GraphError("vertex " + std::to_string(i) + " has zero weight w_V");
  }
  std::size_t nc = 0;
  const auto labels = g.component_labels(&nc);
  if (nc > 1) {
    std::vector<std::size_t> sizes(nc, 0);
    for (Index l : labels) ++sizes[l];
    std::sort(sizes.rbegin(), sizes.rend());
    std::ostringstream os;
    os << "graph is disconnected: " << nc << " components of sizes";
    for (std::size_t i = 0; i < std::min<std::size_t>(sizes.size(), 20); ++i) os << ' ' << sizes[i];
    if (sizes.size() > 20) os << " ...";
    throw GraphError(os.str());
  }
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v[arg] < 0.0) v = -v;
}

}  // namespace

SymmetrizedLaplacian::SymmetrizedLaplacian(const WeightedGraph& g)
    : g_(g), scale_(2.0 / (g.epsilon() * g.epsilon())) {
  const auto n = static_cast<Eigen::Index>(g.n_vertices());
  diag_ = Eigen::VectorXd::Zero(n);
  sqrt_w_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) sqrt_w_[i] = std::sqrt(g.w_V()[static_cast<std::size_t>(i)]);
  coupling_.resize(g.n_edges());
  Eigen::VectorXd offsum = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k < g.n_edges(); ++k) {
    const auto [i, j] = g.edges()[k];
    const double w = g.w_E()[k];
    diag_[i] += w;
    diag_[j] += w;
    coupling_[k] = w / (sqrt_w_[i] * sqrt_w_[j]);
    offsum[i] += coupling_[k];
    offsum[j] += coupling_[k];
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    diag_[i] /= g.w_V()[static_cast<std::size_t>(i)];
    norm_bound_ = std::max(norm_bound_, scale_ * (diag_[i] + offsum[i]));
  }
}

void SymmetrizedLaplacian::apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  y = diag_.cwiseProduct(x);
  const auto& edges = g_.edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto [i, j] = edges[k];
    y[i] -= coupling_[k] * x[j];
    y[j] -= coupling_[k] * x[i];
  }
  y *= scale_;
}

Eigen::MatrixXd SymmetrizedLaplacian::to_dense() const {
  const auto n = diag_.size();
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  S.diagonal() = scale_ * diag_;
  const auto& edges = g_.edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto [i, j] = edges[k];
    S(i, j) -= scale_ * coupling_[k];
    S(j, i) -= scale_ * coupling_[k];
  }
  return S;
}

Eigen::VectorXd SymmetrizedLaplacian::kernel_vector() const { return sqrt_w_ / sqrt_w_.norm(); }

std::vector<int> cluster_eigenvalues(const Eigen::VectorXd& values, double relative_gap) {
  std::vector<int> ids(static_cast<std::size_t>(values.size()), 0);
  if (values.size() == 0) return ids;
  const double scale = std::max(values.cwiseAbs().maxCoeff(), 1e-300);
  int id = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (values[i] - values[i - 1] >= relative_gap * scale) ++id;
    ids[static_cast<std::size_t>(i)] = id;
  }
  return ids;
}

SpectralResult eigen_decompose(const WeightedGraph& g, int k, double tol, const EigenOptions& opts) {
  const auto n = static_cast<Eigen::Index>(g.n_vertices());
  if (k < 0 || k >= n) throw DomainError("eigen_decompose: need 0 <= k < n");
  require_solvable(g);
  const SymmetrizedLaplacian S(g);

  const bool dense = opts.solver == SolverChoice::dense ||
                     (opts.solver == SolverChoice::automatic &&
                      g.n_vertices() <= opts.dense_threshold);
  SpectralResult out;
  out.meta.tolerance = tol;
  out.meta.operator_norm_bound = S.norm_bound();
  out.meta.residual_bound = tol * S.norm_bound();
  Eigen::MatrixXd psi(n, k + 1);
  out.eigenvalues.resize(k + 1);

  if (dense) {
    out.meta.method = "dense_selfadjoint";
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S.to_dense());
    if (es.info() != Eigen::Success) throw SolverError("dense eigensolver failed");
    out.eigenvalues = es.eigenvalues().head(k + 1);
    psi = es.eigenvectors().leftCols(k + 1);
    // connected graph: the kernel is exactly span{W^{1/2} 1}
    out.eigenvalues[0] = 0.0;
    psi.col(0) = S.kernel_vector();
  } else {
    out.meta.method = "thick_restart_lanczos";
    out.meta.start_seed = opts.start_seed.value_or(g.hash());
    const Eigen::MatrixXd kernel = S.kernel_vector();
    out.eigenvalues[0] = 0.0;
    psi.col(0) = kernel.col(0);
    if (k > 0) {
      LanczosOptions lo;
      lo.nev = k;
      lo.tol = tol;
      lo.norm_bound = S.norm_bound();
      lo.seed = out.meta.start_seed;
      lo.max_restarts = opts.max_restarts;
      const auto res = lanczos([&S](const Eigen::VectorXd& x, Eigen::VectorXd& y) { S.apply(x, y); },
                               n, lo, &kernel);
      out.meta.restarts = res.restarts;
      out.meta.matvecs = res.matvecs;
      out.eigenvalues.tail(k) = res.values;
      psi.rightCols(k) = res.vectors;
    }
  }

  out.residuals.resize(k + 1);
  Eigen::VectorXd y(n);
  for (int i = 0; i <= k; ++i) {
    S.apply(psi.col(i), y);
    out.residuals[i] = (y - out.eigenvalues[i] * psi.col(i)).norm();
  }
  if (!dense) {
    for (int i = 0; i <= k; ++i) {
      if (out.residuals[i] > 10.0 * out.meta.residual_bound) {
        std::ostringstream os;
        os << "eigenpair " << i << " residual " << out.residuals[i] << " exceeds bound "
           << out.meta.residual_bound;
        throw SolverError(os.str());
      }
    }
  }
  out.eigenvectors.resize(n, k + 1);
  for (int i = 0; i <= k; ++i) {
    out.eigenvectors.col(i) = psi.col(i).cwiseQuotient(S.sqrt_weights());
    fix_sign(out.eigenvectors.col(i));
  }
  out.cluster_ids = cluster_eigenvalues(out.eigenvalues, 1e-6);
  return out;
}

double rayleigh_quotient(const WeightedGraph& g, const GraphFunction& phi) {
  const double nrm = inner_product(g, phi, phi);
  if (!(nrm > 0.0)) throw DomainError("rayleigh_quotient: phi has zero vol_Gamma norm");
  return dirichlet_energy(g, phi) / nrm;
}

double eigenvalue_estimate(const SpectralResult& spectral, int k, int m) {
  if (k < 0 || k >= spectral.count()) throw DomainError("eigenvalue_estimate: k out of range");
  return (m + 2) * spectral.eigenvalues[k];
}

}  // namespace spectral_limits
