#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spectral_limits/graph.hpp"
#include "spectral_limits/lanczos.hpp"

namespace spectral_limits {

enum class SolverChoice { automatic, dense, lanczos };

struct EigenOptions {
  SolverChoice solver = SolverChoice::automatic;
  /// Graphs up to this size use the dense solver under `automatic`.
  std::size_t dense_threshold = 512;
  /// Overrides the graph-hash start vector of the Lanczos iteration.
  std::optional<std::uint64_t> start_seed;
  int max_restarts = 3000;
};

struct SolverMetadata {
  std::string method;
  double tolerance = 0.0;
  /// Absolute residual bound the solver enforced: tolerance * ||S|| (Gershgorin).
  double residual_bound = 0.0;
  double operator_norm_bound = 0.0;
  int restarts = 0;
  long matvecs = 0;
  std::uint64_t start_seed = 0;
};

/// Low eigenpairs of Delta_Gamma. Eigenvectors are vol_Gamma-orthonormal columns;
/// residuals[k] = ||Delta phi_k - lambda_k phi_k||_{vol_Gamma}.
struct SpectralResult {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
  Eigen::VectorXd residuals;
  /// Consecutive eigenvalues closer than 1e-6 * scale share a cluster id.
  std::vector<int> cluster_ids;
  SolverMetadata meta;

  int count() const noexcept { return static_cast<int>(eigenvalues.size()); }
  GraphFunction eigenvector(int k) const { return eigenvectors.col(k); }
};

/// S = W^{1/2} Delta_Gamma W^{-1/2} as a symmetric sparse operator.
class SymmetrizedLaplacian {
 public:
  explicit SymmetrizedLaplacian(const WeightedGraph& g);

  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
  Eigen::MatrixXd to_dense() const;
  /// Gershgorin bound on the spectral radius.
  double norm_bound() const noexcept { return norm_bound_; }
  /// Normalized W^{1/2} 1, the kernel of S for a connected graph.
  Eigen::VectorXd kernel_vector() const;
  const Eigen::VectorXd& sqrt_weights() const noexcept { return sqrt_w_; }

 private:
  const WeightedGraph& g_;
  double scale_;
  Eigen::VectorXd diag_;
  std::vector<double> coupling_;
  Eigen::VectorXd sqrt_w_;
  double norm_bound_ = 0.0;
};

/// The k + 1 smallest eigenpairs lambda_0 <= ... <= lambda_k.
SpectralResult eigen_decompose(const WeightedGraph& g, int k, double tol = 1e-10,
                               const EigenOptions& opts = {});

double rayleigh_quotient(const WeightedGraph& g, const GraphFunction& phi);

/// (m + 2) lambda_k(Gamma).
double eigenvalue_estimate(const SpectralResult& spectral, int k, int m);

std::vector<int> cluster_eigenvalues(const Eigen::VectorXd& values, double relative_gap);

}  // namespace spectral_limits
