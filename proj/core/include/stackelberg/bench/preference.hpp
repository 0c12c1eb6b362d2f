#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stackelberg/bench/config.hpp"
#include "stackelberg/equilibria.hpp"

namespace stackelberg::bench {

// Cartesian product of config.sweep over the base config. No sweep gives the config
// itself; a parameter with an empty value list gives no configs.
std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& config);

struct PreferenceRow {
  GameSpec game;
  std::optional<PreferenceTable> table;
  std::string error;  // oracle failure message, empty on success
};

// Oracle failures are recorded per row; the remaining rows still run.
std::vector<PreferenceRow> compute_preference_rows(const std::vector<ExperimentConfig>& configs,
                                                   unsigned workers = 1);

// Columns: game, p, B, lambda, sigma2, risk_L_dm_leads, risk_L_agents_lead,
// risk_R_dm_leads, risk_R_agents_lead, delta_L, delta_R, error.
void write_preference_csv(std::ostream& out, const std::vector<PreferenceRow>& rows);

void export_preference_table(const std::vector<ExperimentConfig>& configs, const std::string& path,
                             unsigned workers = 1);

}  // namespace stackelberg::bench
