#include "spectral_limits/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "spectral_limits/errors.hpp"
#include "spectral_limits/rng.hpp"

namespace spectral_limits {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void deflate_vector(const MatrixXd* D, VectorXd& w) {
  if (D == nullptr || D->cols() == 0) return;
  for (int pass = 0; pass < 2; ++pass) w.noalias() -= *D * (D->transpose() * w);
}

// Classical Gram-Schmidt, two passes; returns the accumulated coefficients.
VectorXd orthogonalize(const MatrixXd& V, Index cols, VectorXd& w) {
  VectorXd h = VectorXd::Zero(cols);
  if (cols == 0) return h;
  for (int pass = 0; pass < 2; ++pass) {
    const VectorXd c = V.leftCols(cols).transpose() * w;
    w.noalias() -= V.leftCols(cols) * c;
    h += c;
  }
  return h;
}

bool random_orthogonal(Xoshiro256& rng, const MatrixXd& V, Index cols, const MatrixXd* D,
                       VectorXd& out) {
  for (int attempt = 0; attempt < 5; ++attempt) {
    for (Index i = 0; i < out.size(); ++i) out[i] = rng.normal();
    deflate_vector(D, out);
    orthogonalize(V, cols, out);
    deflate_vector(D, out);
    const double nrm = out.norm();
    if (nrm > 1e-8) {
      out /= nrm;
      return true;
    }
  }
  return false;
}

LanczosResult run_once(const SymmetricOperator& op, Index n, const LanczosOptions& opts,
                       const MatrixXd* D) {
  const Index deflated = D == nullptr ? 0 : D->cols();
  const Index n_eff = n - deflated;
  const int nev = opts.nev;
  if (nev < 1 || nev > n_eff) {
    throw SolverError("lanczos: requested " + std::to_string(nev) + " eigenpairs from a space of dimension " +
                      std::to_string(n_eff));
  }
  Index ncv = opts.ncv > 0 ? opts.ncv : std::max(2 * nev + 10, nev + 30);
  ncv = std::min<Index>(std::max<Index>(ncv, nev + 1), n_eff);

  Xoshiro256 rng(opts.seed);
  MatrixXd V = MatrixXd::Zero(n, ncv + 1);
  MatrixXd H = MatrixXd::Zero(ncv, ncv);
  VectorXd w(n);
  {
    VectorXd v0(n);
    if (!random_orthogonal(rng, V, 0, D, v0)) throw SolverError("lanczos: cannot build a start vector");
    V.col(0) = v0;
  }

  LanczosResult res;
  double anorm = opts.norm_bound;
  Index kept = 0;
  for (int restart = 0; restart <= opts.max_restarts; ++restart) {
    double beta_last = 0.0;
    for (Index j = kept; j < ncv; ++j) {
      op(V.col(j), w);
      ++res.matvecs;
      deflate_vector(D, w);
      const VectorXd h = orthogonalize(V, j + 1, w);
      deflate_vector(D, w);
      for (Index i = 0; i <= j; ++i) {
        H(i, j) = h[i];
        H(j, i) = h[i];
      }
      anorm = std::max(anorm, std::fabs(h[j]));
      double beta = w.norm();
      if (beta <= 1e-12 * std::max(anorm, 1e-300)) {
        // invariant subspace found: continue with a fresh orthogonal direction
        beta = 0.0;
        VectorXd fresh(n);
        if (j + 1 < n_eff && random_orthogonal(rng, V, j + 1, D, fresh)) {
          V.col(j + 1) = fresh;
        } else {
          V.col(j + 1).setZero();
        }
      } else {
        V.col(j + 1) = w / beta;
      }
      if (j + 1 < ncv) {
        H(j + 1, j) = beta;
        H(j, j + 1) = beta;
      }
      beta_last = beta;
    }

    Eigen::SelfAdjointEigenSolver<MatrixXd> es(H);
    const VectorXd& theta = es.eigenvalues();
    const MatrixXd& U = es.eigenvectors();
    anorm = std::max({anorm, std::fabs(theta[0]), std::fabs(theta[ncv - 1])});

    std::vector<Index> order(static_cast<std::size_t>(ncv));
    std::iota(order.begin(), order.end(), Index{0});
    if (opts.largest) std::reverse(order.begin(), order.end());

    const double threshold = opts.tol * anorm;
    int n_conv = 0;
    for (int i = 0; i < nev; ++i) {
      if (std::fabs(beta_last * U(ncv - 1, order[static_cast<std::size_t>(i)])) <= threshold) ++n_conv;
    }
    res.restarts = restart;
    if (n_conv == nev || ncv == n_eff) {
      res.values.resize(nev);
      res.vectors.resize(n, nev);
      for (int i = 0; i < nev; ++i) {
        const Index c = order[static_cast<std::size_t>(i)];
        res.values[i] = theta[c];
        res.vectors.col(i) = V.leftCols(ncv) * U.col(c);
      }
      res.residuals.resize(nev);
      VectorXd y(n);
      for (int i = 0; i < nev; ++i) {
        op(res.vectors.col(i), y);
        ++res.matvecs;
        res.residuals[i] = (y - res.values[i] * res.vectors.col(i)).norm();
      }
      res.converged = true;
      return res;
    }

    // thick restart: keep the wanted end of the Ritz spectrum plus the residual direction
    kept = std::min<Index>(nev + (ncv - nev) / 2, ncv - 1);
    MatrixXd Usel(ncv, kept);
    for (Index i = 0; i < kept; ++i) Usel.col(i) = U.col(order[static_cast<std::size_t>(i)]);
    const MatrixXd Y = V.leftCols(ncv) * Usel;
    const VectorXd next = V.col(ncv);
    V.leftCols(kept) = Y;
    V.col(kept) = next;
    H.setZero();
    for (Index i = 0; i < kept; ++i) {
      H(i, i) = theta[order[static_cast<std::size_t>(i)]];
      const double b = beta_last * Usel(ncv - 1, i);
      H(kept, i) = b;
      H(i, kept) = b;
    }
  }

  std::ostringstream os;
  os << "lanczos did not converge after " << opts.max_restarts << " restarts (" << res.matvecs
     << " products)";
  throw SolverError(os.str());
}

}  // namespace

LanczosResult lanczos(const SymmetricOperator& op, Eigen::Index n, const LanczosOptions& opts,
                      const Eigen::MatrixXd* deflate) {
  LanczosResult res = run_once(op, n, opts, deflate);
  if (!opts.verify_multiplicity) return res;

  const Index base = deflate == nullptr ? 0 : deflate->cols();
  for (int round = 0; round < opts.nev; ++round) {
    const Index found = res.vectors.cols();
    if (base + found >= n) break;
    MatrixXd D(n, base + found);
    if (base > 0) D.leftCols(base) = *deflate;
    D.rightCols(found) = res.vectors;
    LanczosOptions o = opts;
    o.nev = 1;
    o.seed = derive_seed(opts.seed, static_cast<std::uint64_t>(round) + 1);
    o.verify_multiplicity = false;
    const LanczosResult chk = run_once(op, n, o, &D);
    res.matvecs += chk.matvecs;
    const double scale = std::max({std::fabs(res.values[0]), std::fabs(res.values[found - 1]),
                                   opts.norm_bound, 1e-300});
    const double margin = 10.0 * opts.tol * scale;
    const double worst = res.values[found - 1];
    const bool missed = opts.largest ? chk.values[0] > worst + margin : chk.values[0] < worst - margin;
    if (!missed) break;
    // merge the missed pair and drop the least wanted one
    std::vector<std::pair<double, Index>> items;
    for (Index i = 0; i < found; ++i) items.emplace_back(res.values[i], i);
    items.emplace_back(chk.values[0], found);
    std::sort(items.begin(), items.end(), [&](const auto& a, const auto& b) {
      return opts.largest ? a.first > b.first : a.first < b.first;
    });
    LanczosResult merged;
    merged.values.resize(found);
    merged.vectors.resize(n, found);
    merged.residuals.resize(found);
    for (Index i = 0; i < found; ++i) {
      const Index src = items[static_cast<std::size_t>(i)].second;
      if (src == found) {
        merged.values[i] = chk.values[0];
        merged.vectors.col(i) = chk.vectors.col(0);
        merged.residuals[i] = chk.residuals[0];
      } else {
        merged.values[i] = res.values[src];
        merged.vectors.col(i) = res.vectors.col(src);
        merged.residuals[i] = res.residuals[src];
      }
    }
    merged.restarts = res.restarts + chk.restarts;
    merged.matvecs = res.matvecs;
    merged.converged = true;
    res = std::move(merged);
  }
  return res;
}

}  // namespace spectral_limits
