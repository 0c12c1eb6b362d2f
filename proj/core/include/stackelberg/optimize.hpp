#pragma once

#include <optional>

#include "stackelberg/games.hpp"
#include "stackelberg/rng.hpp"
#include "stackelberg/types.hpp"

namespace stackelberg {

// Euclidean projection onto a centred ball. Points on the boundary are returned unchanged.
Vec project_ball(const Vec& v, const BallSet& set);

// Uniform draw from the unit sphere S^{dim-1} (normalised Gaussian).
Vec sample_sphere(int dim, Rng& rng);

// Step size and perturbation radius of the derivative-free (slow) learner.
//
//   eta(t)   = eta0   * d^{-1/2} * t^{-exponent_eta}
//   delta(t) = delta0 * d^{+1/2} * t^{-exponent_delta}     (decaying)
//   delta    = delta0 * d^{+1/2} * T^{-exponent_delta}     (constant, horizon T known)
//
// The d factors are only present when dim_scaling is set.
struct StepSchedule {
  double eta0 = 1.0;
  double exponent_eta = 0.75;
  double delta0 = 1.0;
  double exponent_delta = 0.25;
  bool dim_scaling = false;
  // When set, delta is frozen at its value for this horizon.
  std::optional<long> constant_delta_horizon;

  double eta(long t, int dim) const;
  double delta(long t, int dim) const;

  void validate() const;
};

// State of the single-point zeroth-order learner. The deployed point in epoch t
// is phi + delta_t * last_u.
struct ZeroOrderState {
  Vec phi;
  Vec last_u;
  long t = 1;
};

ZeroOrderState make_zero_order_state(Vec phi0, const BallSet& set, Rng& rng);

// phi + delta_t u_t; not projected, so it may leave the feasible set by delta_t.
Vec deployed_point(const ZeroOrderState& state, const StepSchedule& schedule);

// phi_{t+1} = Proj(phi_t - eta_t (d / delta_t) * observed_loss * u_t), then draws u_{t+1}.
// `observed_loss` must be the loss measured at deployed_point(state, schedule).
ZeroOrderState zero_order_step(const ZeroOrderState& state, double observed_loss,
                               const StepSchedule& schedule, const BallSet& set, Rng& rng);

// One gradient step of the agents on R(., theta), projected onto `constraint` when given.
Vec agent_gd_step(const Game& game, const Vec& mu, const Vec& theta, double eta_mu,
                  const std::optional<BallSet>& constraint);

// One projected gradient step of the decision-maker on L(mu, .).
Vec dm_gd_step(const Game& game, const Vec& mu, const Vec& theta, double eta,
               const BallSet& theta_set);

struct DescentResult {
  Vec point;
  // Norm of the projected-gradient map (x - Proj(x - eta g)) / eta at `point`.
  double residual = 0.0;
  int steps = 0;
};

// Projected gradient descent on L(mu, .) over the model set until the residual
// drops to `tol` or `max_steps` is reached.
DescentResult descend_L_theta(const Game& game, const Vec& mu, Vec theta_init, double eta,
                              double tol, int max_steps);

// Same for the agents on R(., theta), over the action set when the game has one.
DescentResult descend_R_mu(const Game& game, const Vec& theta, Vec mu_init, double eta, double tol,
                           int max_steps);

}  // namespace stackelberg
