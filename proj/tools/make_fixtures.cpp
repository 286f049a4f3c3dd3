// Regenerates the Sturm-Liouville reference fixtures under tests/fixtures.
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "spectral_limits/reference.hpp"
#include "spectral_limits/report_io.hpp"

namespace fs = std::filesystem;
using namespace spectral_limits;

int main(int argc, char** argv) {
  CLI::App app{"Write Sturm-Liouville reference fixtures"};
  std::string out = "tests/fixtures";
  int mesh = 4096;
  app.add_option("--out", out, "fixture directory")->capture_default_str();
  app.add_option("--mesh", mesh, "finest mesh (also solved at mesh/2 and mesh/4)")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  auto emit = [&](const ReferenceSpectrum& spec, const std::string& name) {
    std::ostringstream os;
    write_fixture(os, make_fixture(spec, name));
    write_text_file(fs::path(out) / (name + ".csv"), os.str());
    std::cout << name << ": lambda_1 = " << format_number(spec.eigenvalue(1)) << ", Richardson ratios ["
              << spec.provenance.richardson_min << ", " << spec.provenance.richardson_max << "]\n";
  };
  try {
    const auto circle = ManifoldModel::circle(1.0);
    emit(weighted_circle_spectrum(1.0, DensitySpec::cosine_tilt(circle, 0.2), 8, mesh), "weighted_circle_a0.2");
    emit(spindle_spectrum(3, ManifoldModel::kSpindleWarp, 4, 10, mesh), "spindle_m3_c0.70710678");
    emit(spindle_spectrum(2, ManifoldModel::kSpindleWarp, 5, 10, mesh), "spindle_m2_c0.70710678");
  } catch (const std::exception& e) {
    std::cerr << "spectral-limits-fixtures: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
