#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "spectral_limits/graph.hpp"
#include "spectral_limits/sampling.hpp"

namespace spectral_limits {

/// A parsed value of the flat TOML subset: number, bool, string or a list of those.
using ConfigScalar = std::variant<double, bool, std::string>;
using ConfigValue = std::variant<double, bool, std::string, std::vector<ConfigScalar>>;

/// `key = value` lines, `[section]` headers (keys become "section.key"), `#` comments,
/// basic strings, numbers, booleans and single-line arrays.
std::map<std::string, ConfigValue> parse_key_values(std::string_view text);

enum class EpsRule { schedule, fixed };
enum class Report { spectrum, alignment, regularity, distortion, energy, moser };
std::string to_string(Report r);
Report report_from_string(const std::string& name);

struct ExperimentConfig {
  // manifold
  std::string manifold = "circle";
  double radius = 1.0;
  int dim = 0;  // 0 picks 2 for the sphere and 3 for the spindle
  std::vector<double> periods{1.0, 1.0};
  double warp = 0.70710678118654752440;
  // density
  std::string density = "uniform";
  double amplitude = 0.0;
  // sweep cells
  std::vector<std::size_t> n{1000};
  std::vector<std::uint64_t> seeds{1};
  EpsRule eps_rule = EpsRule::schedule;
  double eps = 0.0;
  double eps_scale = 1.0;
  GraphKind graph = GraphKind::gamma_N;
  DistanceMetric metric = DistanceMetric::embedded;
  int k_max = 6;
  std::vector<Report> reports;
  unsigned threads = 1;
  // [reference]
  std::string reference_fixture;
  int reference_mesh = 4096;
  int reference_l_max = 4;
  // [alignment]
  int align_k = 1;
  int align_l = 1;
  // [regularity]
  double sigma = 1.0;
  std::size_t centers = 0;  // 0 keeps the CenterSample default
  std::size_t max_exact_ball = 2000;
  std::vector<double> moser_p{2.0, 4.0, 8.0, std::numeric_limits<double>::infinity()};
  // [distortion]
  double distortion_p = 0.0;  // 0 picks m + 2
  double distortion_K = 1.0;
  std::size_t distortion_n_mc = 200000;
  std::size_t distortion_n_outer = 20000;
  std::size_t distortion_n_inner = 200;
  // [sweep]
  bool svg = true;

  /// Raw configuration text, hashed into run metadata.
  std::string source;

  ManifoldModel make_manifold() const;
  DensitySpec make_density(const ManifoldModel& mfd) const;
  double epsilon(std::size_t n_points) const;
  /// Throws ConfigError on invalid combinations (n < 16, empty seeds, ...).
  void validate() const;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view data);

}  // namespace spectral_limits
