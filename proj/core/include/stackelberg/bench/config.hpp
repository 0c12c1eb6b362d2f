#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stackelberg/dynamics.hpp"
#include "stackelberg/equilibria.hpp"
#include "stackelberg/games.hpp"

namespace stackelberg::bench {

enum class GameKind { kLinear, kLogisticConstrained, kLogisticCostly };

const char* to_string(GameKind kind);

struct GameSpec {
  GameKind kind = GameKind::kLinear;
  // linear
  std::vector<double> beta;
  double sigma2 = 0.0;
  // logistic
  double p = 0.5;
  std::vector<double> alpha;
  int n = 100;
  // Separate sample count for the equilibrium oracles; reuse the dynamics samples when unset.
  std::optional<int> oracle_samples;
  double lambda = 1.0;
  // shared
  double B = 0.0;
  double theta_radius = kDefaultThetaRadius;

  int dim() const;
};

struct RunSpec {
  Order order = Order::kProactive;
  long T = 1;
  int tau = 1;
  StepSchedule slow;
  double fast_eta = 0.1;
  IterateMode iterate_mode = IterateMode::kLast;
  // Freeze delta at its horizon-T value (constant-perturbation regime).
  bool constant_delta = false;
};

struct OutputSpec {
  std::string dir = "results";
  std::string prefix = "run";
};

struct ExperimentConfig {
  std::optional<std::string> preset;
  GameSpec game;
  std::vector<RunSpec> runs;
  std::uint64_t seed = 0;
  // Effective horizon is T / scale (desk scale); 1 means full scale.
  long scale = 1;
  OutputSpec output;
  OracleOptions oracle;
  bool compute_equilibria = true;
  // Parameter sweep for preference tables: field name -> values.
  std::map<std::string, std::vector<double>> sweep;
};

// Validation failure carrying every problem found, not just the first.
class ConfigValidationError : public std::runtime_error {
 public:
  explicit ConfigValidationError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

// Parses and validates a JSON document. A "preset" key expands to the preset's
// full configuration; any other keys given alongside it override the preset.
ExperimentConfig parse_config(const nlohmann::json& document);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

nlohmann::json to_json(const ExperimentConfig& config);

// Names of the built-in presets.
std::vector<std::string> preset_names();
// Fully explicit JSON for a preset; throws ConfigValidationError for unknown names.
nlohmann::json preset_document(const std::string& name);

// Effective run parameters after desk-scale division.
Schedule make_schedule(const RunSpec& run, long scale);

// Game used by the dynamics, and the (possibly larger-sample) game used by the oracles.
std::unique_ptr<Game> make_game(const GameSpec& spec, std::uint64_t seed);
std::unique_ptr<Game> make_oracle_game(const GameSpec& spec, std::uint64_t seed);

// Oracle options with the search box filled in for unconstrained agents.
OracleOptions resolve_oracle_options(const ExperimentConfig& config);

// Stable digest of the canonical config serialization, ignoring the output directory.
std::string config_digest(const ExperimentConfig& config);

}  // namespace stackelberg::bench
