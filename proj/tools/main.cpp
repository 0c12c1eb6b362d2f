#include <fnmatch.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stackelberg/bench/config.hpp"
#include "stackelberg/bench/experiment.hpp"
#include "stackelberg/bench/preference.hpp"
#include "stackelberg/bench/regret.hpp"
#include "stackelberg/errors.hpp"

namespace fs = std::filesystem;
using namespace stackelberg::bench;

namespace {

constexpr const char* kOutDirEnv = "STACKELBERG_OUT_DIR";

struct GlobalFlags {
  std::optional<std::uint64_t> seed;
  std::optional<long> scale;
  std::optional<std::string> out;
  unsigned workers = 1;
  bool full_scale = false;
};

Overrides overrides_from(const GlobalFlags& flags) {
  Overrides o;
  o.seed = flags.seed;
  o.scale = flags.full_scale ? std::optional<long>(1) : flags.scale;
  if (flags.out) {
    o.out_dir = flags.out;
  } else if (const char* env = std::getenv(kOutDirEnv); env && *env) {
    o.out_dir = env;
  }
  return o;
}

ExperimentConfig load(const std::string& path, const GlobalFlags& flags) {
  ExperimentConfig config = apply_overrides(load_config(path), overrides_from(flags));
  if (config.preset)
    std::cerr << "expanded preset " << *config.preset << ": " << to_json(config).dump() << "\n";
  return config;
}

// Expands shell-style wildcards in the file-name part of `pattern`.
std::vector<std::string> expand_glob(const std::string& pattern) {
  const fs::path p(pattern);
  const std::string name = p.filename().string();
  if (name.find_first_of("*?[") == std::string::npos) return {pattern};
  const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
  std::vector<std::string> out;
  if (fs::is_directory(dir)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      if (fnmatch(name.c_str(), entry.path().filename().c_str(), 0) == 0)
        out.push_back((p.has_parent_path() ? dir / entry.path().filename() : entry.path().filename()).string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void print_completion(const ExperimentResult& r) {
  std::cout << r.results_path.string() << (r.completed ? "" : " (aborted)") << "\n";
  for (const auto& t : r.trace_paths) std::cout << "  " << t.string() << "\n";
}

int cmd_run(const std::string& path, const GlobalFlags& flags) {
  const ExperimentResult r = run_experiment(load(path, flags));
  print_completion(r);
  return r.completed ? 0 : 2;
}

int cmd_sweep(const std::vector<std::string>& patterns, const GlobalFlags& flags) {
  std::vector<ExperimentConfig> configs;
  for (const auto& pattern : patterns) {
    const auto paths = expand_glob(pattern);
    if (paths.empty()) std::cerr << "warning: no files match " << pattern << "\n";
    for (const auto& path : paths) configs.push_back(load(path, flags));
  }
  if (configs.empty()) {
    std::cerr << "error: no configs to run\n";
    return 1;
  }
  bool ok = true;
  for (const auto& r : run_sweep(configs, flags.workers)) {
    print_completion(r);
    ok = ok && r.completed;
  }
  return ok ? 0 : 2;
}

int cmd_equilibria(const std::string& path, const GlobalFlags& flags) {
  const ExperimentConfig config = load(path, flags);
  const nlohmann::json doc = equilibria_document(config);
  fs::create_directories(config.output.dir);
  const fs::path out = fs::path(config.output.dir) / (config.output.prefix + "_equilibria.json");
  std::ofstream(out, std::ios::binary) << doc.dump(2) << "\n";
  std::cout << doc.dump(2) << "\n";
  return doc.contains("error") ? 1 : 0;
}

int cmd_regret_slope(const std::vector<std::string>& traces, const std::string& targets) {
  const SlopeFit fit = fit_regret_slope_files(traces, load_regret_target(targets));
  for (const auto& w : fit.warnings) std::cerr << "warning: " << w << "\n";
  nlohmann::json doc = {{"slope", fit.slope},
                        {"intercept", fit.intercept},
                        {"points_used", fit.points_used},
                        {"warnings", fit.warnings}};
  std::cout << doc.dump(2) << "\n";
  return 0;
}

int cmd_preference_table(const std::string& path, const GlobalFlags& flags) {
  const ExperimentConfig config = load(path, flags);
  const auto configs = expand_sweep(config);
  fs::create_directories(config.output.dir);
  const fs::path out = fs::path(config.output.dir) / (config.output.prefix + "_preference.csv");
  const auto rows = compute_preference_rows(configs, flags.workers);
  std::ofstream file(out, std::ios::binary);
  write_preference_csv(file, rows);
  std::cout << out.string() << "\n";
  for (const auto& row : rows)
    if (!row.error.empty()) std::cerr << "warning: oracle failure: " << row.error << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learning dynamics in Stackelberg games with strategic agents"};
  app.set_version_flag("--version", software_version());
  app.require_subcommand(1);

  GlobalFlags flags;
  std::uint64_t seed = 0;
  long scale = 1;
  std::string out;
  app.add_option("--seed", seed, "Override the config seed");
  auto* scale_opt = app.add_option("--scale", scale, "Divide every horizon T by this")
                        ->check(CLI::PositiveNumber);
  app.add_flag("--full-scale", flags.full_scale, "Use the full horizons (same as --scale 1)")
      ->excludes(scale_opt);
  app.add_option("--out", out, std::string("Output directory (overrides ") + kOutDirEnv + ")");
  app.add_option("--workers", flags.workers, "Concurrent runs or oracle rows")
      ->check(CLI::PositiveNumber);

  std::string config_path;
  std::vector<std::string> patterns, traces;
  std::string targets;

  auto* run = app.add_subcommand("run", "Run the configured dynamics and write traces and results");
  run->add_option("config", config_path, "Config JSON")->required();
  auto* sweep = app.add_subcommand("sweep", "Run several configs concurrently");
  sweep->add_option("configs", patterns, "Config files or wildcard patterns")->required();
  auto* equilibria = app.add_subcommand("equilibria", "Compute both Stackelberg equilibria");
  equilibria->add_option("config", config_path, "Config JSON")->required();
  auto* regret = app.add_subcommand("regret-slope", "Fit the log-log slope of cumulative regret");
  regret->add_option("traces", traces, "Trace CSV files")->required();
  regret->add_option("--targets", targets, "JSON with risk_L or a results document")->required();
  auto* pref = app.add_subcommand("preference-table", "Export equilibrium risks over a sweep");
  pref->add_option("config", config_path, "Config JSON with a sweep block")->required();

  for (auto* sub : {run, sweep, equilibria, regret, pref}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);
  if (app.count("--seed")) flags.seed = seed;
  if (app.count("--scale")) flags.scale = scale;
  if (app.count("--out")) flags.out = out;

  try {
    if (*run) return cmd_run(config_path, flags);
    if (*sweep) return cmd_sweep(patterns, flags);
    if (*equilibria) return cmd_equilibria(config_path, flags);
    if (*regret) return cmd_regret_slope(traces, targets);
    if (*pref) return cmd_preference_table(config_path, flags);
  } catch (const ConfigValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
