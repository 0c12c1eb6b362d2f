#include "stackelberg/optimize.hpp"

#include <cmath>
#include <random>
#include <utility>

#include "stackelberg/errors.hpp"

namespace stackelberg {

Vec project_ball(const Vec& v, const BallSet& set) {
  if (v.size() != set.dim) throw DimensionError("project_ball: dimension mismatch");
  const double norm = v.norm();
  if (norm <= set.radius) return v;
  return v * (set.radius / norm);
}

Vec sample_sphere(int dim, Rng& rng) {
  if (dim < 1) throw DimensionError("sample_sphere: dim must be >= 1");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec u(dim);
  double norm = 0.0;
  do {
    for (int k = 0; k < dim; ++k) u[k] = gauss(rng);
    norm = u.norm();
  } while (norm == 0.0);
  return u / norm;
}

double StepSchedule::eta(long t, int dim) const {
  const double scale = dim_scaling ? 1.0 / std::sqrt(static_cast<double>(dim)) : 1.0;
  return eta0 * scale * std::pow(static_cast<double>(t), -exponent_eta);
}

double StepSchedule::delta(long t, int dim) const {
  const double scale = dim_scaling ? std::sqrt(static_cast<double>(dim)) : 1.0;
  const long clock = constant_delta_horizon ? *constant_delta_horizon : t;
  return delta0 * scale * std::pow(static_cast<double>(clock), -exponent_delta);
}

void StepSchedule::validate() const {
  if (!(eta0 >= 0.0) || !std::isfinite(eta0)) throw ConfigError("schedule: eta0 must be >= 0");
  if (!(delta0 > 0.0) || !std::isfinite(delta0)) throw ConfigError("schedule: delta0 must be > 0");
  if (!std::isfinite(exponent_eta) || exponent_eta < 0.0)
    throw ConfigError("schedule: exponent_eta must be >= 0 (non-increasing steps)");
  if (!std::isfinite(exponent_delta)) throw ConfigError("schedule: exponent_delta must be finite");
  if (constant_delta_horizon && *constant_delta_horizon < 1)
    throw ConfigError("schedule: constant-delta horizon must be >= 1");
}

ZeroOrderState make_zero_order_state(Vec phi0, const BallSet& set, Rng& rng) {
  ZeroOrderState state;
  state.phi = project_ball(phi0, set);
  state.last_u = sample_sphere(set.dim, rng);
  state.t = 1;
  return state;
}

Vec deployed_point(const ZeroOrderState& state, const StepSchedule& schedule) {
  const int dim = static_cast<int>(state.phi.size());
  return state.phi + schedule.delta(state.t, dim) * state.last_u;
}

ZeroOrderState zero_order_step(const ZeroOrderState& state, double observed_loss,
                               const StepSchedule& schedule, const BallSet& set, Rng& rng) {
  const int dim = static_cast<int>(state.phi.size());
  const double delta = schedule.delta(state.t, dim);
  if (!(delta > 0.0)) throw ConfigError("zero_order_step: perturbation radius must be > 0");
  const double eta = schedule.eta(state.t, dim);

  ZeroOrderState next;
  next.phi = project_ball(state.phi - (eta * dim / delta * observed_loss) * state.last_u, set);
  next.t = state.t + 1;
  next.last_u = sample_sphere(dim, rng);
  return next;
}

Vec agent_gd_step(const Game& game, const Vec& mu, const Vec& theta, double eta_mu,
                  const std::optional<BallSet>& constraint) {
  Vec next = mu - eta_mu * game.grad_R_mu(mu, theta);
  if (constraint) return project_ball(next, *constraint);
  return next;
}

Vec dm_gd_step(const Game& game, const Vec& mu, const Vec& theta, double eta,
               const BallSet& theta_set) {
  return project_ball(theta - eta * game.grad_L_theta(mu, theta), theta_set);
}

namespace {

template <typename Step>
DescentResult descend(Vec x, double eta, double tol, int max_steps, Step&& step) {
  DescentResult out;
  for (;;) {
    Vec next = step(x);
    out.residual = (x - next).norm() / eta;
    if (out.residual <= tol || out.steps >= max_steps) break;
    x = std::move(next);
    ++out.steps;
  }
  out.point = std::move(x);
  return out;
}

}  // namespace

DescentResult descend_L_theta(const Game& game, const Vec& mu, Vec theta_init, double eta,
                              double tol, int max_steps) {
  if (!(eta > 0.0)) throw ConfigError("descend_L_theta: step must be > 0");
  const BallSet& set = game.theta_set();
  return descend(project_ball(theta_init, set), eta, tol, max_steps,
                 [&](const Vec& theta) { return dm_gd_step(game, mu, theta, eta, set); });
}

DescentResult descend_R_mu(const Game& game, const Vec& theta, Vec mu_init, double eta, double tol,
                           int max_steps) {
  if (!(eta > 0.0)) throw ConfigError("descend_R_mu: step must be > 0");
  const std::optional<BallSet> set = game.action_set();
  Vec start = set ? project_ball(mu_init, *set) : std::move(mu_init);
  return descend(std::move(start), eta, tol, max_steps,
                 [&](const Vec& mu) { return agent_gd_step(game, mu, theta, eta, set); });
}

}  // namespace stackelberg
