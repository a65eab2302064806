#include "lsfem/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lsfem {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.5e", v);
  return buf;
}

std::vector<std::string> header_names(const AdaptiveReport& report) {
  std::vector<std::string> names = {"level",  "elements", "vertices", "dofs",
                                    "eta",    "err_y",    "err_l2",   "err_xvh"};
  if (!report.rows.empty())
    for (const auto& [name, value] : report.rows.front().characteristics) names.push_back(name);
  return names;
}

}  // namespace

LevelRow::LevelRow()
    : eta_global(std::numeric_limits<double>::quiet_NaN()),
      err_y(std::numeric_limits<double>::quiet_NaN()),
      err_l2(std::numeric_limits<double>::quiet_NaN()),
      err_xvh(std::numeric_limits<double>::quiet_NaN()) {}

std::vector<double> eoc(const std::vector<double>& errors, const std::vector<double>& counts,
                        int dim) {
  if (errors.size() != counts.size()) throw std::invalid_argument("eoc: length mismatch");
  if (errors.size() < 2) throw std::invalid_argument("eoc: need at least two levels");
  std::vector<double> out;
  out.reserve(errors.size() - 1);
  for (std::size_t k = 1; k < errors.size(); ++k) {
    if (!(errors[k - 1] > 0.0) || !(errors[k] > 0.0))
      throw std::invalid_argument("eoc: errors must be positive");
    if (!(counts[k - 1] > 0.0) || !(counts[k] > 0.0))
      throw std::invalid_argument("eoc: counts must be positive");
    out.push_back(std::log(errors[k - 1] / errors[k]) /
                  std::log(std::pow(counts[k] / counts[k - 1], 1.0 / dim)));
  }
  return out;
}

void write_csv(const AdaptiveReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);

  const auto names = header_names(report);
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  out << "\n";

  for (const auto& row : report.rows) {
    out << row.level << "," << row.elements << "," << row.vertices << "," << row.dofs << ","
        << sci(row.eta_global) << "," << sci(row.err_y) << "," << sci(row.err_l2) << ","
        << sci(row.err_xvh);
    for (const auto& [name, value] : row.characteristics) out << "," << sci(value);
    out << "\n";
  }
  if (!out) throw std::runtime_error("write_csv: write failed for " + path);
}

std::string format_table(const AdaptiveReport& report) {
  std::ostringstream os;
  os << "# " << report.benchmark;
  if (!report.config_echo.empty()) os << " (" << report.config_echo << ")";
  os << "\n";

  const auto names = header_names(report);
  for (std::size_t i = 0; i < names.size(); ++i) os << (i ? "  " : "") << names[i];
  os << "\n";
  for (const auto& row : report.rows) {
    os << row.level << "  " << row.elements << "  " << row.vertices << "  " << row.dofs << "  "
       << sci(row.eta_global) << "  " << sci(row.err_y) << "  " << sci(row.err_l2) << "  "
       << sci(row.err_xvh);
    for (const auto& [name, value] : row.characteristics) os << "  " << sci(value);
    os << "\n";
  }
  return os.str();
}

}  // namespace lsfem
