#include "stackelberg/equilibria.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "stackelberg/errors.hpp"
#include "stackelberg/optimize.hpp"

namespace stackelberg {

const char* to_string(Leader leader) {
  return leader == Leader::kDecisionMaker ? "decision_maker" : "agents";
}

const char* to_string(EquilibriumMethod method) {
  switch (method) {
    case EquilibriumMethod::kClosedForm:
      return "closed_form";
    case EquilibriumMethod::kGridSearch:
      return "grid_search";
    case EquilibriumMethod::kOuterGD:
      return "outer_gd";
  }
  return "unknown";
}

AgentResponse mu_br_constrained(const Vec& theta, double budget) {
  if (!(budget >= 0.0)) throw ConfigError("mu_br_constrained: budget must be >= 0");
  const double norm = theta.norm();
  if (norm == 0.0) return {Vec::Zero(theta.size()), true};
  return {theta * (budget / norm), false};
}

Vec mu_br_costly(const Vec& theta, double lambda) {
  if (!(lambda > 0.0)) throw ConfigError("mu_br_costly: lambda must be > 0");
  return theta / lambda;
}

Vec theta_br_linear(const Vec& mu, const Vec& beta) {
  if (mu.size() != beta.size()) throw DimensionError("theta_br_linear: dimension mismatch");
  return beta - mu * (mu.dot(beta) / (1.0 + mu.squaredNorm()));
}

std::pair<EquilibriumReport, EquilibriumReport> linear_equilibria(const LinearRegressionGame& game) {
  const Vec& beta = game.beta();
  const double beta_norm = beta.norm();
  if (beta_norm == 0.0) throw ConfigError("linear_equilibria: beta = 0 gives a degenerate game");
  const double B = game.budget();
  const double half_noise = 0.5 * game.sigma2();

  EquilibriumReport dm;
  dm.leader = Leader::kDecisionMaker;
  dm.method = EquilibriumMethod::kClosedForm;
  dm.point = beta / (1.0 + B * B);
  dm.follower_point = mu_br_constrained(dm.point, B).mu;
  dm.risk_L = half_noise + beta.squaredNorm() * B * B / (2.0 * (1.0 + B * B));
  dm.risk_R = -beta_norm * B / (1.0 + B * B);

  const double C = std::min(1.0, B);
  EquilibriumReport agents;
  agents.leader = Leader::kAgents;
  agents.method = EquilibriumMethod::kClosedForm;
  agents.point = beta * (C / beta_norm);
  agents.follower_point = theta_br_linear(agents.point, beta);
  agents.risk_L = half_noise + beta.squaredNorm() * C * C / (2.0 * (1.0 + C * C));
  agents.risk_R = -beta_norm * C / (1.0 + C * C);
  return {std::move(dm), std::move(agents)};
}

Vec stackelberg_gradient_L(const Game& game, const Vec& theta) {
  const std::optional<Vec> br = game.best_response_mu(theta);
  if (!br) throw DiagnosticUnavailable(game.name() + ": SR_L gradient needs a closed-form mu_BR");
  return game.grad_L_theta(*br, theta) + game.best_response_mu_vjp(theta, game.grad_L_mu(*br, theta));
}

EquilibriumReport dm_equilibrium_numeric(const Game& game, const OuterGdOptions& options) {
  if (options.steps < 0) throw ConfigError("dm_equilibrium_numeric: steps must be >= 0");
  if (!(options.eta > 0.0)) throw ConfigError("dm_equilibrium_numeric: eta must be > 0");
  if (!game.best_response_mu(Vec::Zero(game.dim())))
    throw DiagnosticUnavailable(game.name() + ": needs a closed-form agent best response");

  const BallSet& set = game.theta_set();
  // The constrained best response is undefined at 0; start just off it.
  Vec theta = Vec::Zero(game.dim());
  theta[0] = 1e-8;

  auto residual_at = [&](const Vec& x, const Vec& g) {
    return (x - project_ball(x - options.eta * g, set)).norm() / options.eta;
  };
  Vec grad = stackelberg_gradient_L(game, theta);
  int steps = 0;
  for (; steps < options.steps && residual_at(theta, grad) > options.tol; ++steps) {
    theta = project_ball(theta - options.eta * grad, set);
    if (theta.norm() == 0.0) theta[0] = 1e-8;
    grad = stackelberg_gradient_L(game, theta);
    if (!all_finite(theta) || !all_finite(grad)) {
      throw DivergenceError("dm_equilibrium_numeric: non-finite iterate", steps + 1);
    }
  }

  EquilibriumReport report;
  report.leader = Leader::kDecisionMaker;
  report.method = EquilibriumMethod::kOuterGD;
  report.point = theta;
  report.follower_point = *game.best_response_mu(theta);
  report.risk_L = game.loss_L(report.follower_point, theta);
  report.risk_R = game.loss_R(report.follower_point, theta);
  // Projected-gradient residual, so a solution on the boundary of the model set counts as stationary.
  report.residual = residual_at(theta, grad);
  if (!std::isfinite(report.risk_L)) throw DivergenceError("dm_equilibrium_numeric: non-finite loss", steps);
  if (report.residual > options.tol) {
    std::ostringstream msg;
    msg << "outer gradient descent stopped after " << steps << " steps at residual "
        << report.residual << " > " << options.tol;
    report.warnings.push_back(msg.str());
  }
  return report;
}

namespace {

struct Candidate {
  Vec mu;
  Vec theta;
  double sr_R = std::numeric_limits<double>::infinity();
  double residual = 0.0;
  bool evaluated = false;
};

// Candidates are solved in fixed-length chains, each warm-started from the previous
// candidate's solution. Chains never depend on the worker count, so results don't either.
constexpr std::size_t kChainLength = 64;

void evaluate_all(const Game& game, const GridSearchOptions& options, std::vector<Candidate>& cands) {
  const std::size_t n_chains = (cands.size() + kChainLength - 1) / kChainLength;
  auto solve_chain = [&](std::size_t chain) {
    Vec theta = Vec::Zero(game.dim());
    const std::size_t end = std::min(cands.size(), (chain + 1) * kChainLength);
    for (std::size_t i = chain * kChainLength; i < end; ++i) {
      Candidate& c = cands[i];
      const DescentResult br = descend_L_theta(game, c.mu, theta, options.inner_eta,
                                               options.inner_tol, options.inner_steps);
      c.theta = br.point;
      c.residual = br.residual;
      c.sr_R = game.loss_R(c.mu, c.theta);
      c.evaluated = true;
      theta = br.point;
    }
  };

  unsigned workers = options.workers ? options.workers : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n_chains)));
  if (workers == 1) {
    for (std::size_t c = 0; c < n_chains; ++c) solve_chain(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        try {
          for (std::size_t c = next++; c < n_chains; c = next++) solve_chain(c);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n_chains;
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

// Smallest SR_R; ties go to the smaller ||mu||, then to the earlier grid index.
std::size_t select_best(const std::vector<Candidate>& cands) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < cands.size(); ++i) {
    const Candidate& a = cands[i];
    const Candidate& b = cands[best];
    if (a.sr_R < b.sr_R || (a.sr_R == b.sr_R && a.mu.norm() < b.mu.norm())) best = i;
  }
  return best;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  if (n == 1) {
    out[0] = 0.5 * (lo + hi);
    return out;
  }
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return out;
}

std::vector<Candidate> lattice_2d(const Vec& center, double half_width, int n,
                                  const std::optional<BallSet>& feasible) {
  std::vector<Candidate> out;
  const auto xs = linspace(center[0] - half_width, center[0] + half_width, n);
  const auto ys = linspace(center[1] - half_width, center[1] + half_width, n);
  for (double x : xs) {
    for (double y : ys) {
      Candidate c;
      c.mu = Vec(2);
      c.mu << x, y;
      if (feasible && !feasible->contains(c.mu)) continue;
      out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace

EquilibriumReport agents_equilibrium_numeric(const Game& game, const GridSearchOptions& options) {
  const int d = game.dim();
  if (d != 1 && d != 2)
    throw ConfigError("agents_equilibrium_numeric: grid search supports d = 1 or 2");
  if (options.grid < 1 || options.lattice < 1)
    throw ConfigError("agents_equilibrium_numeric: grid sizes must be >= 1");

  const std::optional<BallSet> feasible = game.action_set();
  double half_width = 0.0;
  if (options.half_width) {
    half_width = *options.half_width;
  } else if (feasible) {
    half_width = feasible->radius;
  } else {
    throw ConfigError("agents_equilibrium_numeric: unconstrained agents need an explicit half_width");
  }
  if (!(half_width >= 0.0)) throw ConfigError("agents_equilibrium_numeric: half_width must be >= 0");

  std::vector<Candidate> cands;
  if (d == 1) {
    const int n = half_width == 0.0 ? 1 : options.grid;
    for (double x : linspace(-half_width, half_width, n)) {
      Candidate c;
      c.mu = Vec::Constant(1, x);
      cands.push_back(std::move(c));
    }
  } else {
    cands = lattice_2d(Vec::Zero(2), half_width, half_width == 0.0 ? 1 : options.lattice, feasible);
  }
  if (cands.empty()) throw ConfigError("agents_equilibrium_numeric: empty search grid");
  evaluate_all(game, options, cands);
  Candidate best = cands[select_best(cands)];

  if (d == 2 && half_width > 0.0 && options.lattice > 1) {
    const double cell = 2.0 * half_width / (options.lattice - 1);
    std::vector<Candidate> refined = lattice_2d(best.mu, 2.0 * cell, options.lattice, feasible);
    if (!refined.empty()) {
      evaluate_all(game, options, refined);
      const Candidate& r = refined[select_best(refined)];
      if (r.sr_R < best.sr_R) best = r;
    }
  }

  EquilibriumReport report;
  report.leader = Leader::kAgents;
  report.method = EquilibriumMethod::kGridSearch;
  report.point = best.mu;
  report.follower_point = best.theta;
  report.risk_L = game.loss_L(best.mu, best.theta);
  report.risk_R = best.sr_R;
  report.residual = best.residual;
  if (best.residual > options.inner_tol) {
    std::ostringstream msg;
    msg << "follower gradient descent stopped at residual " << best.residual << " > "
        << options.inner_tol;
    report.warnings.push_back(msg.str());
  }
  return report;
}

PreferenceTable preference_table(const Game& game, const OracleOptions& options) {
  PreferenceTable table;
  if (const auto* linear = dynamic_cast<const LinearRegressionGame*>(&game)) {
    auto [dm, agents] = linear_equilibria(*linear);
    table.dm_leads = std::move(dm);
    table.agents_lead = std::move(agents);
  } else {
    table.dm_leads = dm_equilibrium_numeric(game, options.outer);
    table.agents_lead = agents_equilibrium_numeric(game, options.grid);
  }
  table.delta_L = table.dm_leads.risk_L - table.agents_lead.risk_L;
  table.delta_R = table.dm_leads.risk_R - table.agents_lead.risk_R;
  return table;
}

}  // namespace stackelberg
