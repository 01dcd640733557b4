#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "xiga/config.hpp"
#include "xiga/studies.hpp"
#include "xiga/vtkout.hpp"

namespace fs = std::filesystem;

namespace {

void apply_thread_env() {
  if (const char* env = std::getenv("XIGA_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) Eigen::setNbThreads(n);
  }
}

int cmd_run(const std::string& config_path, const std::string& out_dir) {
  const xiga::config::RunConfig cfg = xiga::config::load(config_path);
  fs::create_directories(out_dir);
  const fs::path base = fs::path(out_dir) / cfg.name;

  const xiga::studies::Solved s = xiga::studies::solve_problem(cfg.problem);
  std::cout << cfg.name << ": " << s.disc->enr.num_dofs() << " dofs, "
            << s.disc->mesh.cells.size() << " integration cells, relative residual "
            << s.residual << "\n";
  if (s.residual > 1e-8) std::cerr << cfg.name << ": warning: residual above 1e-8\n";

  const auto sampler = s.sampler();
  if (cfg.outputs.field_vtk) {
    xiga::vtkout::write_field(base.string() + "_field.vtk", sampler);
    std::cout << "wrote " << base.string() + "_field.vtk\n";
  }
  if (cfg.outputs.mesh_vtk) {
    xiga::vtkout::write_cells(base.string() + "_cells.vtk", s.disc->mesh);
    xiga::vtkout::write_interfaces(base.string() + "_interfaces.vtk", s.disc->mesh);
  }
  if (cfg.outputs.matrix) {
    const auto sys = xiga::system::assemble(cfg.problem, *s.disc);
    xiga::system::write_matrix_market(sys.A, base.string() + "_matrix.mtx");
  }
  if (cfg.outputs.level_histogram)
    xiga::vtkout::write_level_histogram(base.string() + "_levels.csv", s.disc->enr);

  if (cfg.has_reference) {
    const auto err = xiga::verification::errors_vs_exact(
        sampler, cfg.reference.value, cfg.reference.gradient, cfg.problem.degree + 2);
    nlohmann::json report{{"name", cfg.name},
                          {"dofs", s.disc->enr.num_dofs()},
                          {"residual", s.residual},
                          {"l2", err.l2},
                          {"h1", err.h1}};
    std::ofstream out(base.string() + "_report.json");
    out << report.dump(2) << "\n";
    std::cout << "L2 = " << err.l2 << ", H1 = " << err.h1 << " (report "
              << base.string() + "_report.json)\n";
  }
  return 0;
}

int cmd_study(const std::string& id, const xiga::studies::StudyOptions& opt,
              const std::string& out_dir) {
  const auto rows = xiga::studies::run_study(id, opt);
  fs::create_directories(out_dir);
  const fs::path base = fs::path(out_dir) / id;
  xiga::studies::write_csv(base.string() + ".csv", rows);
  std::ofstream rates(base.string() + "_rates.csv");
  rates << xiga::studies::rates_summary(rows);
  std::cout << "wrote " << base.string() + ".csv"
            << " (" << rows.size() << " runs) and " << base.string() + "_rates.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Immersed spline solver for multi-material heat conduction and elasticity"};
  app.require_subcommand(1);
  // --h (mesh sizes) below would clash with the default -h/--help pair.
  app.set_help_flag("--help", "Print help");

  std::string config_path, out_dir = ".";
  CLI::App* run = app.add_subcommand("run", "Solve one configured problem");
  run->add_option("config", config_path, "JSON problem configuration")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory");

  std::string study_id;
  xiga::studies::StudyOptions opt;
  std::string study_out = ".";
  CLI::App* study = app.add_subcommand("study", "Run a benchmark study");
  study->set_help_flag("--help", "Print help");
  study->add_option("id", study_id, "Study id")->required();
  study->add_option("--p", opt.ps, "Spline degrees to run");
  study->add_option("--h", opt.hs, "Mesh sizes to run");
  study->add_option("--gamma-g", opt.gamma_gs, "Ghost penalty values to run");
  study->add_option("--out", study_out, "Output directory");

  CLI11_PARSE(app, argc, argv);
  apply_thread_env();

  try {
    if (run->parsed()) return cmd_run(config_path, out_dir);
    opt.cache_dir = study_out;
    return cmd_study(study_id, opt, study_out);
  } catch (const xiga::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
