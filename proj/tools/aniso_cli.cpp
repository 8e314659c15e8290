#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aniso/experiments.hpp"

namespace {

struct Options {
  std::string config;
  std::string preset;
  std::vector<std::string> params;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> threads;
  bool deterministic = false;
  std::optional<std::string> out;
  std::optional<double> ratio_ceiling;
  std::optional<std::uint64_t> n_paths;
  bool plot_data = false;
  bool print_config = false;
};

void add_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "experiment file");
  cmd->add_option("--preset", o.preset, "built-in preset (see list-presets)");
  cmd->add_option("--param", o.params, "preset parameter, key=value (repeatable)");
  cmd->add_option("--seed", o.seed, "base seed");
  cmd->add_option("--threads", o.threads, "worker threads, a number or 'auto'");
  cmd->add_flag("--deterministic", o.deterministic, "fixed-order reduction, no timing in the summary");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--ratio-ceiling", o.ratio_ceiling, "max/min ceiling of sandwich windows");
  cmd->add_option("--n-paths", o.n_paths, "paths per estimate");
  cmd->add_flag("--plot-data", o.plot_data, "also write (x, y) series files");
  cmd->add_flag("--print-config", o.print_config, "print the resolved experiment file and exit");
}

std::map<std::string, double> parse_params(const std::vector<std::string>& raw) {
  std::map<std::string, double> out;
  for (const auto& p : raw) {
    const auto eq = p.find('=');
    if (eq == std::string::npos) throw aniso::ConfigError("--param expects key=value, got '" + p + "'");
    try {
      std::size_t used = 0;
      const double v = std::stod(p.substr(eq + 1), &used);
      if (used != p.size() - eq - 1) throw std::invalid_argument(p);
      out[p.substr(0, eq)] = v;
    } catch (const std::logic_error&) {
      throw aniso::ConfigError("--param value is not a number: '" + p + "'");
    }
  }
  return out;
}

// First preset of the requested kind, used when neither --config nor --preset is given.
std::string default_preset(aniso::ExperimentKind kind) {
  for (const auto& p : aniso::list_presets()) {
    if (aniso::preset_config(p.name).kind == kind) return p.name;
  }
  throw aniso::ConfigError("no preset for " + aniso::to_string(kind) + "; pass --config");
}

aniso::ExperimentConfig resolve(const Options& o, std::optional<aniso::ExperimentKind> kind) {
  if (!o.config.empty() && !o.preset.empty()) {
    throw aniso::ConfigError("--config and --preset are mutually exclusive");
  }
  aniso::ExperimentConfig c;
  if (!o.config.empty()) {
    if (!o.params.empty()) throw aniso::ConfigError("--param applies to presets only");
    c = aniso::load_config(o.config);
  } else if (!o.preset.empty()) {
    c = aniso::preset_config(o.preset, parse_params(o.params));
  } else if (kind) {
    c = aniso::preset_config(default_preset(*kind), parse_params(o.params));
  } else {
    throw aniso::ConfigError("pass --config or --preset");
  }
  if (kind && c.kind != *kind) {
    throw aniso::ConfigError("experiment '" + aniso::to_string(c.kind) + "' does not match subcommand '" +
                             aniso::to_string(*kind) + "'");
  }
  if (o.seed) c.seed = *o.seed;
  if (o.threads) {
    if (*o.threads == "auto") {
      c.threads = 0;
    } else {
      try {
        std::size_t used = 0;
        const unsigned long v = std::stoul(*o.threads, &used);
        if (used != o.threads->size() || v == 0) throw std::invalid_argument(*o.threads);
        c.threads = static_cast<unsigned>(v);
      } catch (const std::logic_error&) {
        throw aniso::ConfigError("--threads expects a positive number or 'auto'");
      }
    }
  }
  if (o.deterministic) c.deterministic = true;
  if (o.out) c.out = *o.out;
  if (o.ratio_ceiling) c.ratio_ceiling = *o.ratio_ceiling;
  if (o.n_paths) c.n_paths = *o.n_paths;
  if (o.plot_data) c.plot_data = true;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo and quadrature checks for cylindrical jump processes"};
  app.require_subcommand(1);

  Options opts;
  std::optional<aniso::ExperimentKind> chosen;
  bool run_mode = false;

  auto* list = app.add_subcommand("list-presets", "print the built-in presets");
  auto* run_cmd = app.add_subcommand("run", "run the experiment named in the file or preset");
  add_options(run_cmd, opts);
  run_cmd->callback([&] { run_mode = true; });
  for (auto kind : aniso::all_experiment_kinds()) {
    auto* cmd = app.add_subcommand(aniso::to_string(kind));
    add_options(cmd, opts);
    cmd->callback([&chosen, kind] { chosen = kind; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : aniso::kExitConfig;
  }

  if (list->parsed()) {
    for (const auto& p : aniso::list_presets()) {
      std::cout << p.name << "  " << p.description;
      if (!p.params.empty()) {
        std::cout << "  [";
        bool first = true;
        for (const auto& [k, v] : p.params) {
          std::cout << (first ? "" : ", ") << k << '=' << aniso::format_number(v);
          first = false;
        }
        std::cout << ']';
      }
      std::cout << '\n';
    }
    return aniso::kExitPass;
  }

  aniso::ExperimentConfig cfg;
  try {
    cfg = resolve(opts, run_mode ? std::nullopt : chosen);
  } catch (const aniso::Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return aniso::kExitConfig;
  }
  if (opts.print_config) {
    std::cout << aniso::serialize(cfg);
    return aniso::kExitPass;
  }
  return aniso::run(cfg, std::cout);
}
