#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stackelberg/bench/config.hpp"

namespace stackelberg::bench {

const char* software_version();

// Command-line / environment overrides applied on top of a parsed config.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<long> scale;
  std::optional<std::string> out_dir;
};

ExperimentConfig apply_overrides(ExperimentConfig config, const Overrides& overrides);

// Equilibrium reports for both orders of play, computed on the oracle game.
nlohmann::json equilibria_document(const ExperimentConfig& config);

struct ExperimentResult {
  nlohmann::json document;
  std::filesystem::path results_path;
  std::vector<std::filesystem::path> trace_paths;
  bool completed = true;  // false if any run aborted
};

// Runs every configured order of play, writes one trace CSV per run and a results
// JSON document into config.output.dir.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Runs independent configs on up to `workers` threads. Results keep the input order.
std::vector<ExperimentResult> run_sweep(const std::vector<ExperimentConfig>& configs,
                                        unsigned workers);

// Mean of `values` over the last ceil(fraction * size) entries.
double terminal_window_mean(const std::vector<double>& values, double fraction = 0.1);

}  // namespace stackelberg::bench
