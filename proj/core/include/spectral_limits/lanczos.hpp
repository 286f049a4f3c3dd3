#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Dense>

namespace spectral_limits {

/// y = A x for a symmetric operator A.
using SymmetricOperator = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& y)>;

struct LanczosOptions {
  int nev = 6;
  /// Krylov subspace size; 0 picks max(2 nev + 10, nev + 30) capped by n.
  int ncv = 0;
  /// Ritz pairs are accepted once ||A y - theta y|| <= tol * norm_bound.
  double tol = 1e-10;
  /// Upper bound on ||A||; 0 uses the largest Ritz value seen so far.
  double norm_bound = 0.0;
  int max_restarts = 3000;
  bool largest = false;
  std::uint64_t seed = 0x5eed;
  /// Run one extra deflated solve to catch eigenvalues a single Krylov sequence missed
  /// (exact multiplicities).
  bool verify_multiplicity = true;
};

struct LanczosResult {
  Eigen::VectorXd values;   // ascending (or descending when largest)
  Eigen::MatrixXd vectors;  // orthonormal columns
  Eigen::VectorXd residuals;
  int restarts = 0;
  long matvecs = 0;
  bool converged = false;
};

/// Thick-restart Lanczos with full (two-pass) reorthogonalization. Columns of
/// `deflate` (orthonormal) are projected out of every Krylov vector, so the
/// solve acts on their orthogonal complement.
LanczosResult lanczos(const SymmetricOperator& op, Eigen::Index n, const LanczosOptions& opts,
                      const Eigen::MatrixXd* deflate = nullptr);

}  // namespace spectral_limits
