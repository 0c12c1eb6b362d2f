#pragma once

#include <string>
#include <vector>

#include "stackelberg/dynamics.hpp"

namespace stackelberg::bench {

struct RegretPoint {
  double horizon = 0.0;
  double regret = 0.0;
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t points_used = 0;
  std::vector<std::string> warnings;
};

// Least-squares slope of log(regret) against log(horizon). Needs at least three
// distinct horizons; points with nonpositive regret are dropped with a warning.
SlopeFit fit_regret_slope(const std::vector<RegretPoint>& points);

// sum_t (stackelberg_risk_t - target) over the trace.
double cumulative_stackelberg_regret(const Trace& trace, double target);

// Reads the decision-maker's target risk from either {"risk_L": x} or a results document.
double load_regret_target(const std::string& path);

// Regret of each trace file is sum_t (L_t - target) and its horizon is the row
// count. Traces sharing a horizon are averaged before fitting.
SlopeFit fit_regret_slope_files(const std::vector<std::string>& trace_paths, double target);

}  // namespace stackelberg::bench
