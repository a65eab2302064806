#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "lsfem/lsfem.hpp"
#include "lsfem/problems.hpp"
#include "lsfem/report.hpp"
#include "lsfem/vtk.hpp"

namespace {

// Uniform studies whose initial mesh is already huge (the deep rows of the
// boundary-layer tables) stay behind --long so a default invocation finishes
// in minutes.
constexpr int long_uniform_threshold = 10000;

std::string format_theta(double theta) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", theta);
  return buf;
}

int run_benchmark(const std::string& id, const std::string& strategy,
                  const std::string& test_space, double theta, int levels_override,
                  long max_dofs_override, const std::string& out_dir, bool vtk, bool long_run) {
  const lsfem::Benchmark* bench = lsfem::find_benchmark(id);
  if (bench == nullptr) {
    std::cerr << "unknown benchmark '" << id << "'; available ids:\n";
    for (const lsfem::Benchmark& b : lsfem::benchmark_registry())
      std::cerr << "  " << b.name << "\n";
    return 2;
  }
  if (theta <= 0.0 || theta > 1.0) {
    std::cerr << "--theta must lie in (0, 1], got " << theta << "\n";
    return 2;
  }

  lsfem::TestKind test_kind = bench->default_test_kind;
  if (test_space == "p2_same_mesh")
    test_kind = lsfem::TestKind::p2_same_mesh;
  else if (test_space == "p1_refined_mesh")
    test_kind = lsfem::TestKind::p1_refined_mesh;
  else if (!test_space.empty()) {
    std::cerr << "--test-space must be p2_same_mesh or p1_refined_mesh\n";
    return 2;
  }

  std::filesystem::create_directories(out_dir);
  const lsfem::ExactSolution* exact = bench->exact ? &*bench->exact : nullptr;

  int next_level = 0;
  auto on_level = [&](const lsfem::LevelHookData& data) {
    next_level = data.level + 1;
    if (!vtk) return;
    const std::string stem =
        out_dir + "/" + bench->name + "_" + strategy + "_L" + std::to_string(data.level);
    lsfem::write_vtk(*data.u, "u", stem + "_u.vtk");
    if (data.p != nullptr) lsfem::write_vtk(*data.p, "p", stem + "_p.vtk");
  };

  lsfem::AdaptiveReport report;
  std::string csv_name;
  try {
    if (strategy == "uniform") {
      lsfem::UniformConfig config;
      config.levels = levels_override > 0 ? levels_override : bench->uniform_levels;
      config.least_squares = bench->uniform_least_squares;
      config.test_kind = test_kind;
      config.exact = exact;
      config.extractors = bench->characteristic_extractors;
      config.on_level = on_level;
      const lsfem::MeshPtr mesh = bench->initial_mesh(true);
      if (!long_run && mesh->n_elements() > long_uniform_threshold) {
        std::cerr << bench->name << ": uniform study starts from " << mesh->n_elements()
                  << " elements; rerun with --long\n";
        return 2;
      }
      report = lsfem::uniform_study(bench->descriptor, mesh, config);
      csv_name = bench->name + "_uniform_L" + std::to_string(config.levels) + ".csv";
    } else {
      lsfem::AdaptiveConfig config;
      config.theta = theta;
      config.test_kind = test_kind;
      config.max_dofs = max_dofs_override > 0
                            ? max_dofs_override
                            : (long_run ? bench->adaptive_max_dofs_long : bench->adaptive_max_dofs);
      config.exact = exact;
      config.extractors = bench->characteristic_extractors;
      config.on_level = on_level;
      report = lsfem::adaptive_solve(bench->descriptor, bench->initial_mesh(false), config);
      csv_name = bench->name + "_adaptive_theta" + format_theta(theta) + ".csv";
    }
  } catch (const std::exception& err) {
    std::cerr << bench->name << ": failed at level " << next_level << ": " << err.what() << "\n";
    return 1;
  }

  report.benchmark = bench->name;
  const std::string csv_path = out_dir + "/" + csv_name;
  lsfem::write_csv(report, csv_path);
  std::cout << lsfem::format_table(report);
  std::cout << "csv: " << csv_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive least-squares finite element harness for convection-diffusion problems"};
  app.require_subcommand(1);

  CLI::App* list_cmd = app.add_subcommand("list", "list registered benchmark ids");

  CLI::App* run_cmd = app.add_subcommand("run", "run a benchmark study");
  std::string benchmark_id;
  std::string strategy = "adaptive";
  std::string test_space;
  std::string out_dir = ".";
  double theta = 0.5;
  int levels = 0;
  long max_dofs = 0;
  bool vtk = false;
  bool long_run = false;
  run_cmd->add_option("--benchmark", benchmark_id, "benchmark id (see `list`)")->required();
  run_cmd->add_option("--strategy", strategy, "uniform or adaptive refinement")
      ->check(CLI::IsMember({"uniform", "adaptive"}));
  run_cmd->add_option("--theta", theta, "Dörfler bulk parameter in (0,1]");
  run_cmd->add_option("--test-space", test_space, "p2_same_mesh or p1_refined_mesh");
  run_cmd->add_option("--levels", levels, "uniform refinement levels");
  run_cmd->add_option("--max-dofs", max_dofs, "adaptive dof budget (trial + test)");
  run_cmd->add_option("--out", out_dir, "output directory for CSV/VTK");
  run_cmd->add_flag("--vtk", vtk, "write per-level VTK files");
  run_cmd->add_flag("--long", long_run, "enable the long-running table rows");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list_cmd->parsed()) {
      for (const lsfem::Benchmark& b : lsfem::benchmark_registry())
        std::printf("%-20s %s\n", b.name.c_str(), b.description.c_str());
      return 0;
    }
    return run_benchmark(benchmark_id, strategy, test_space, theta, levels, max_dofs, out_dir,
                         vtk, long_run);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}
