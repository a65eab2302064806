#pragma once

#include <string>
#include <utility>
#include <vector>

namespace lsfem {

/// One row of a convergence study. Quantities that were not computed on a
/// level (no exact solution, no estimator for direct solves) stay NaN.
struct LevelRow {
  int level = 0;
  long elements = 0;
  long vertices = 0;
  long dofs = 0;  ///< total unknowns including constrained ones (trial + test for saddle solves)
  double eta_global;
  double err_y;    ///< sqrt(int (K grad e) . grad e)
  double err_l2;   ///< L2 error over the domain
  double err_xvh;  ///< discrete graph norm sqrt(err_y^2 + ||w_e||_Y^2)
  std::vector<std::pair<std::string, double>> characteristics;

  LevelRow();
};

struct AdaptiveReport {
  std::string benchmark;
  std::string config_echo;
  std::vector<LevelRow> rows;
};

/// eoc_k = log(e_{k-1}/e_k) / log((N_k/N_{k-1})^{1/dim}), one value per
/// consecutive pair. Rejects nonpositive errors or counts.
std::vector<double> eoc(const std::vector<double>& errors, const std::vector<double>& counts,
                        int dim);

/// Plain CSV: header then one row per level, floats in scientific notation
/// with 6 significant digits. Characteristic columns come from the first row.
void write_csv(const AdaptiveReport& report, const std::string& path);

/// Render the same table as aligned text for terminal output.
std::string format_table(const AdaptiveReport& report);

}  // namespace lsfem
