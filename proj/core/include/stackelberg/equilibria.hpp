#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stackelberg/games.hpp"
#include "stackelberg/types.hpp"

namespace stackelberg {

enum class Leader { kDecisionMaker, kAgents };
enum class EquilibriumMethod { kClosedForm, kGridSearch, kOuterGD };

const char* to_string(Leader leader);
const char* to_string(EquilibriumMethod method);

struct EquilibriumReport {
  Leader leader = Leader::kDecisionMaker;
  Vec point;           // theta_SE (decision-maker leads) or mu_SE (agents lead)
  Vec follower_point;  // follower's best response at `point`
  double risk_L = 0.0;
  double risk_R = 0.0;
  EquilibriumMethod method = EquilibriumMethod::kClosedForm;
  double residual = 0.0;  // follower / outer stationarity; 0 for closed forms
  std::vector<std::string> warnings;
};

struct AgentResponse {
  Vec mu;
  bool degenerate = false;  // theta = 0: every feasible mu is a best response
};

// B theta / ||theta||.
AgentResponse mu_br_constrained(const Vec& theta, double budget);
// theta / lambda.
Vec mu_br_costly(const Vec& theta, double lambda);
// (I + mu mu^T)^{-1} beta in Sherman-Morrison form.
Vec theta_br_linear(const Vec& mu, const Vec& beta);

// Exact equilibria of the linear regression game: {decision-maker leads, agents lead}.
std::pair<EquilibriumReport, EquilibriumReport> linear_equilibria(const LinearRegressionGame& game);

struct OuterGdOptions {
  int steps = 100000;
  double eta = 0.1;
  // Stop once the projected-gradient residual falls below this.
  double tol = 1e-8;
};

// Decision-maker's equilibrium by projected gradient descent on
// SR_L(theta) = L(mu_BR(theta), theta), differentiating through the closed-form
// agent best response. Requires game.best_response_mu.
EquilibriumReport dm_equilibrium_numeric(const Game& game, const OuterGdOptions& options = {});

// Composite gradient of SR_L at theta.
Vec stackelberg_gradient_L(const Game& game, const Vec& theta);

struct GridSearchOptions {
  int grid = 1000;          // points per axis in d = 1
  int lattice = 101;        // points per axis in d = 2 (coarse pass and refinement)
  int inner_steps = 10000;  // cap on the follower's gradient-descent steps
  double inner_eta = 0.1;
  double inner_tol = 1e-8;
  // Half-width of the search box. Defaults to the budget for constrained agents;
  // required when the agents are unconstrained.
  std::optional<double> half_width;
  unsigned workers = 0;  // 0: hardware concurrency
};

// Agents' equilibrium: minimise SR_R(mu) = R(mu, theta_BR(mu)) over a grid,
// computing theta_BR(mu) by gradient descent. Supports d = 1 (uniform grid)
// and d = 2 (lattice plus one refinement pass).
EquilibriumReport agents_equilibrium_numeric(const Game& game, const GridSearchOptions& options = {});

struct PreferenceTable {
  EquilibriumReport dm_leads;
  EquilibriumReport agents_lead;
  // risk at the decision-maker's equilibrium minus risk at the agents' equilibrium
  double delta_L = 0.0;
  double delta_R = 0.0;
};

struct OracleOptions {
  OuterGdOptions outer;
  GridSearchOptions grid;
};

// Closed forms for the linear game, numerical oracles otherwise.
PreferenceTable preference_table(const Game& game, const OracleOptions& options = {});

}  // namespace stackelberg
