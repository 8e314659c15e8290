#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "aniso/geometry.hpp"
#include "aniso/scalefn.hpp"
#include "aniso/simulate.hpp"

namespace aniso {

using Json = nlohmann::ordered_json;

// Key-value experiment files:
//
//   # comment
//   experiment = "verify-survival"
//   phi = { kind = "power", alpha = 1.0 }
//   depths = [0.01, 0.04,
//             0.16, 0.64]
//   [sim]
//   horizon = 1.0
//
// Values are strings, numbers, booleans, arrays and inline tables; [a.b] opens a nested
// table. Errors carry the line number and the key.
Json parse_text(std::string_view text);
// Inverse of parse_text. Object members listed in `sections` become [section] blocks,
// every other object is written inline. Doubles are written in shortest round-trip form.
std::string emit_text(const Json& doc, const std::vector<std::string>& sections = {});

Json to_json(const ScaleFunction& f);
ScaleFunction scale_from_json(const Json& j);
Json to_json(const Domain& d);
Domain domain_from_json(const Json& j);

struct KappaConfig {
  std::string kind = "one";  // one, constant, cosine
  double value = 1.0;
  double kappa0 = 1.0;
  double amplitude = 0.0;
  double frequency = 1.0;

  KappaSpec make() const;
  bool operator==(const KappaConfig&) const = default;
};
Json to_json(const KappaConfig& k);
KappaConfig kappa_from_json(const Json& j);

enum class ExperimentKind {
  validate_scalefn,
  check_dgamma,
  verify_free_kernel,
  verify_dhke,
  verify_survival,
  verify_exit,
  verify_green,
  fit_eigenvalue,
  generator_identity,
};

std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind(std::string_view name);
const std::vector<ExperimentKind>& all_experiment_kinds();

struct SimSettings {
  double eps_small_jump = 1e-3;
  double eps_max = 0.05;
  double eps_depth_ratio = 0.1;
  double dt_check = 0.01;
  double horizon = 20.0;
  bool operator==(const SimSettings&) const = default;
};

struct ExperimentConfig {
  std::string name = "experiment";
  ExperimentKind kind = ExperimentKind::validate_scalefn;
  ScaleFunction phi = ScaleFunction::power(1.0);
  Domain domain = Domain::full_space(1);
  KappaConfig kappa;

  std::vector<double> t;
  std::vector<Point> x;
  std::vector<Point> y;
  std::vector<double> depths;
  std::vector<double> radii;
  std::vector<double> diffs;      // offsets in units of phi^-1(t)
  std::vector<double> halfwidth;  // box half-widths; empty means 0.1 phi^-1(t)
  Point boundary_point;           // anchor for depth series; empty means automatic

  double gamma = 1.0;
  std::uint64_t n_paths = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 1;  // 0 = all hardware threads
  bool deterministic = true;
  double ratio_ceiling = 30.0;
  double tolerance = 0.0;  // 0 means the experiment default
  double max_rel_se = 0.3;
  bool allow_inconclusive = false;
  SimSettings sim;

  std::string out = "out";
  bool plot_data = false;

  bool operator==(const ExperimentConfig&) const = default;

  // Experiment-specific requirements (grids present, n_paths >= 100, ...).
  void validate() const;
};

Json to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const Json& j);

std::string serialize(const ExperimentConfig& c);
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

}  // namespace aniso
