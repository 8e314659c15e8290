#pragma once

#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "aniso/config.hpp"
#include "aniso/estimate.hpp"

namespace aniso {

// One CSV line: experiment, t, x..., y..., estimate, std_error, bound_lower, bound_upper,
// ratio. NaN marks a column that does not apply.
struct CsvRow {
  double t = 0.0;
  Point x;
  Point y;
  double estimate = 0.0;
  double std_error = 0.0;
  double bound_lower = 0.0;
  double bound_upper = 0.0;
  double ratio = 0.0;
};

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct RunResult {
  Verdict verdict = Verdict::inconclusive;
  std::vector<CsvRow> rows;
  std::vector<std::pair<std::string, std::string>> summary;
  std::vector<PlotSeries> plots;
  std::vector<std::string> notes;
};

enum ExitCode : int {
  kExitPass = 0,
  kExitViolation = 1,
  kExitInconclusive = 2,
  kExitConfig = 3,
  kExitNumerical = 4,
};

int exit_code(Verdict v, bool allow_inconclusive);

// Runs the experiment without touching the file system. Errors propagate.
RunResult run_experiment(const ExperimentConfig& c);

std::string format_number(double v);
std::string format_csv(const ExperimentConfig& c, const RunResult& r);
std::string format_summary(const ExperimentConfig& c, const RunResult& r);
std::string format_plot(const PlotSeries& s);

// Writes <out>/<name>.csv, <out>/<name>.summary.txt and, with plot_data, one
// <out>/<name>.<series>.plot.csv per series.
void write_artifacts(const ExperimentConfig& c, const RunResult& r);

// Full pipeline with error mapping: config problems give 3, numerical failures 4.
int run(const ExperimentConfig& c, std::ostream& log);

struct PresetInfo {
  std::string name;
  std::string description;
  std::map<std::string, double> params;  // parameter defaults
};

std::vector<PresetInfo> list_presets();
ExperimentConfig preset_config(const std::string& name,
                               const std::map<std::string, double>& params = {});

// Default anchor on the boundary for depth series, with its inward normal.
Point default_boundary_point(const Domain& d);

}  // namespace aniso
