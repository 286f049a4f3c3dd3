#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spectral_limits/config.hpp"
#include "spectral_limits/distortion.hpp"
#include "spectral_limits/graph.hpp"
#include "spectral_limits/interpolation.hpp"
#include "spectral_limits/reference.hpp"
#include "spectral_limits/regularity.hpp"
#include "spectral_limits/report_io.hpp"
#include "spectral_limits/spectral.hpp"

namespace spectral_limits {

/// One (n, seed) cell of a sweep.
struct Cell {
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

/// Cells in n-major order.
std::vector<Cell> sweep_cells(const ExperimentConfig& cfg);

/// Runs fn(i) for i < count on a pool of `threads` workers.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

/// Sampled data set, epsilon and graph of one cell.
struct CellGraph {
  PointCloud cloud;
  double eps = 0.0;
  WeightedGraph graph;
};

CellGraph build_cell(const ExperimentConfig& cfg, const Cell& cell);

/// Eigenvalues (and eigenfunctions where available) of the continuum operator matched by
/// cfg.graph: closed forms for uniform densities on the circle, sphere and torus, the
/// Sturm-Liouville solvers for the tilted circle and the spindle, or cfg.reference_fixture.
ReferenceSpectrum reference_for(const ExperimentConfig& cfg, int k_max);

/// A fixture as an eigenvalue-only reference spectrum.
ReferenceSpectrum reference_from_fixture(const ManifoldModel& mfd, const DensitySpec& dens,
                                         const Fixture& fixture, int k_max);

struct SpectrumRow {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double eps = 0.0;
  int k = 0;
  double lambda = 0.0;
  double scaled = 0.0;  // (m + 2) lambda
  double reference = 0.0;
  double abs_error = 0.0;
  double rel_error = 0.0;
  int cluster = 0;
  bool connected = true;
  std::size_t n_edges = 0;
};

std::vector<SpectrumRow> run_spectrum_experiment(const ExperimentConfig& cfg);
CsvTable spectrum_table(const std::vector<SpectrumRow>& rows);

struct AlignmentFunctionRow {
  int j = 0;
  double norm = 0.0;                 // ||f_j|_X||_{vol_Gamma}
  double projection_residual = 0.0;  // ||(I - p) f_j|_X||_{vol_Gamma}
  double relative_residual = 0.0;    // projection_residual / norm
  double norm_defect = 0.0;          // | ||f_j||_{L^2(rho^i)} - ||p f_j|_X|| |
  double aligned_residual = 0.0;     // ||f~_j|_X - phi_j||_{vol_Gamma}
  double literal_residual = 0.0;     // (1/n) sum_i |f~_j(x_i) - phi_j(i)|^2 w_V(i)
};

struct AlignmentReport {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double eps = 0.0;
  int k = 0;
  int l = 0;
  double gamma = 0.0;
  double s = 0.0;
  /// Relative residual of the whole cluster (Frobenius over the functions).
  double subspace_residual = 0.0;
  double max_relative_residual = 0.0;
  Eigen::MatrixXd rotation;
  std::vector<AlignmentFunctionRow> functions;
};

/// Orthogonal O minimizing ||A O - B||_F given the cross-Gram matrix A^T W B.
Eigen::MatrixXd procrustes_rotation(const Eigen::MatrixXd& cross_gram);

/// gamma = min{lambda_k - lambda_{k-1}, lambda_{l+1} - lambda_l, 1} / 2 (first term dropped
/// for k = 0) and s = lambda_l - lambda_k from the reference spectrum.
std::pair<double, double> spectral_gap_and_width(const ReferenceSpectrum& reference, int k, int l);

/// Projects the discretized reference cluster [k, l] onto span{phi_k..phi_l} in vol_Gamma.
/// Reference functions are rescaled to unit L^2(rho^i vol) norm (i = 1 for Gamma_m, 2 for
/// Gamma^N). Throws DomainError when [k, l] is not a union of reference clusters or the
/// graph spectrum is too short, quoting both gap structures.
AlignmentReport align_eigenspaces(const WeightedGraph& g, const SpectralResult& spectral,
                                  const ReferenceSpectrum& reference, const PointCloud& cloud, int k,
                                  int l);

std::vector<AlignmentReport> run_alignment(const ExperimentConfig& cfg);
CsvTable alignment_table(const std::vector<AlignmentReport>& reports);

struct SweepSummaryRow {
  int k = 0;
  std::size_t n = 0;
  double median_abs_error = 0.0;
  double median_rel_error = 0.0;
  std::size_t cells = 0;
  std::size_t excluded = 0;
  double slope = 0.0;  // least-squares slope of log(median_abs_error) vs log(n), per k
};

/// Least-squares slope of log y against log x; NaN with fewer than two positive pairs.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);
double median(std::vector<double> values);

std::vector<SweepSummaryRow> summarize_sweep(const std::vector<SpectrumRow>& rows);
CsvTable sweep_table(const std::vector<SweepSummaryRow>& rows);
/// Minimal log-log line chart of median absolute error against n, one line per k >= 1.
std::string sweep_svg(const std::vector<SweepSummaryRow>& rows);

struct ConvergenceSweep {
  std::vector<SpectrumRow> cells;
  std::vector<SweepSummaryRow> summary;
};

/// Needs at least three n values and three seeds.
ConvergenceSweep run_convergence_sweep(const ExperimentConfig& cfg);

struct RegularityRow {
  std::uint64_t seed = 0;
  RegularityCertificate certificate;
};
std::vector<RegularityRow> run_regularity(const ExperimentConfig& cfg);
CsvTable regularity_table(const std::vector<RegularityRow>& rows);

struct DistortionRow {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  DistortionEstimate estimate;
  McEstimate v_m2;  // V_{m+2,eps}, feeds the theorem error terms
  TheoremErrorTerms terms;
};
std::vector<DistortionRow> run_distortion(const ExperimentConfig& cfg);
CsvTable distortion_table(const std::vector<DistortionRow>& rows);

struct EnergyRow {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double eps = 0.0;
  std::string function;
  EnergyComparison energy;
  L2Comparison l2;
};
std::vector<EnergyRow> run_energy(const ExperimentConfig& cfg);
CsvTable energy_table(const std::vector<EnergyRow>& rows);

struct MoserRunRow {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double eps = 0.0;
  int k = 0;
  double p = 0.0;
  MoserCheck check;
};
std::vector<MoserRunRow> run_moser(const ExperimentConfig& cfg);
CsvTable moser_table(const std::vector<MoserRunRow>& rows);

}  // namespace spectral_limits
