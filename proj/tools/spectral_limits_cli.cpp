#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "spectral_limits/config.hpp"
#include "spectral_limits/errors.hpp"
#include "spectral_limits/experiment.hpp"
#include "spectral_limits/report_io.hpp"

namespace fs = std::filesystem;
using namespace spectral_limits;

namespace {

struct Options {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

struct Outputs {
  fs::path dir;
  std::vector<std::string> files;

  void write(const std::string& name, const std::string& content) {
    write_text_file(dir / name, content);
    files.push_back(name);
  }
};

std::string cell_suffix(const Cell& c) {
  return "_n" + std::to_string(c.n) + "_seed" + std::to_string(c.seed) + ".csv";
}

void produce(Report r, const ExperimentConfig& cfg, Outputs& out) {
  switch (r) {
    case Report::spectrum: out.write("spectrum.csv", spectrum_table(run_spectrum_experiment(cfg)).str()); break;
    case Report::alignment: out.write("alignment.csv", alignment_table(run_alignment(cfg)).str()); break;
    case Report::regularity: out.write("regularity.csv", regularity_table(run_regularity(cfg)).str()); break;
    case Report::distortion: out.write("distortion.csv", distortion_table(run_distortion(cfg)).str()); break;
    case Report::energy: out.write("energy.csv", energy_table(run_energy(cfg)).str()); break;
    case Report::moser: out.write("moser.csv", moser_table(run_moser(cfg)).str()); break;
  }
}

void run_command(const std::string& command, const Options& opt) {
  auto cfg = load_config(opt.config);
  if (opt.seed) cfg.seeds = {*opt.seed};
  if (opt.threads) cfg.threads = std::max(1U, *opt.threads);
  Outputs out{fs::path(opt.out), {}};

  if (command == "sample" || command == "graph") {
    const auto mfd = cfg.make_manifold();
    const auto dens = cfg.make_density(mfd);
    for (const auto& cell : sweep_cells(cfg)) {
      if (command == "sample") {
        std::ostringstream os;
        write_point_cloud(os, sample_dataset(mfd, dens, cell.n, cell.seed));
        out.write("points" + cell_suffix(cell), os.str());
      } else {
        const auto cg = build_cell(cfg, cell);
        std::ostringstream edges;
        std::ostringstream vertices;
        write_edges_csv(edges, cg.graph);
        write_vertices_csv(vertices, cg.graph);
        out.write("edges" + cell_suffix(cell), edges.str());
        out.write("vertices" + cell_suffix(cell), vertices.str());
      }
    }
  } else if (command == "spectrum") {
    produce(Report::spectrum, cfg, out);
  } else if (command == "align") {
    produce(Report::alignment, cfg, out);
  } else if (command == "regularity") {
    produce(Report::regularity, cfg, out);
  } else if (command == "distortion") {
    produce(Report::distortion, cfg, out);
  } else if (command == "energy") {
    produce(Report::energy, cfg, out);
  } else if (command == "moser") {
    produce(Report::moser, cfg, out);
  } else if (command == "sweep") {
    const auto sweep = run_convergence_sweep(cfg);
    out.write("sweep_cells.csv", spectrum_table(sweep.cells).str());
    out.write("sweep_summary.csv", sweep_table(sweep.summary).str());
    if (cfg.svg) out.write("sweep.svg", sweep_svg(sweep.summary));
  } else if (command == "run") {
    for (auto r : cfg.reports) produce(r, cfg, out);
    if (cfg.reports.empty()) return;
  }

  RunMeta meta;
  meta.command = command;
  meta.config_path = opt.config;
  meta.config_hash = fnv1a(cfg.source);
  meta.seeds = cfg.seeds;
  meta.n = cfg.n;
  meta.threads = cfg.threads;
  meta.outputs = out.files;
  write_text_file(out.dir / "run_meta.json", run_meta_json(meta));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph Laplacian spectral convergence experiments"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  Options opt;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"sample", "write sampled point clouds, one CSV per (n, seed)"},
      {"graph", "write edge and vertex CSVs of the epsilon-graphs"},
      {"spectrum", "graph eigenvalues against the reference spectrum"},
      {"align", "eigenspace alignment residuals for one eigenvalue cluster"},
      {"regularity", "doubling, Poincare, almost-regularity and Moser certificate"},
      {"distortion", "Monte-Carlo V_{p,eps} and S_eps estimates"},
      {"energy", "discrete against continuum Dirichlet energy"},
      {"moser", "Moser ratios of low eigenvectors"},
      {"sweep", "convergence sweep with medians, log-log slopes and an SVG plot"},
      {"run", "every report listed under `reports` in the config"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "experiment config (flat TOML subset)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory")->capture_default_str();
    sub->add_option("--seed", opt.seed, "run a single seed instead of the config list");
    sub->add_option("--threads", opt.threads, "worker threads for independent (n, seed) cells");
  }
  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    run_command(command, opt);
  } catch (const ConfigError& e) {
    std::cerr << "spectral-limits: config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "spectral-limits: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
