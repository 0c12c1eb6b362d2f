#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stackelberg/games.hpp"
#include "stackelberg/optimize.hpp"
#include "stackelberg/types.hpp"

namespace stackelberg {

enum class Order {
  kProactive,  // decision-maker slow (zeroth-order), agents fast (gradient descent)
  kReactive,   // agents slow (zeroth-order), decision-maker fast (gradient descent)
};

enum class IterateMode {
  kAveraged,  // slow player observes the loss at the within-epoch mean of the fast iterates
  kLast,      // slow player observes the loss at the fast player's last iterate
};

const char* to_string(Order order);
const char* to_string(IterateMode mode);

// One epoch is a single update of the slow player followed by `tau` updates of
// the fast player.
struct Schedule {
  Order order = Order::kProactive;
  long T = 1;
  int tau = 1;
  StepSchedule slow;     // derivative-free learner
  double fast_eta = 0.1;  // fixed gradient step of the fast learner
  IterateMode iterate_mode = IterateMode::kLast;
  std::optional<Vec> theta0;  // defaults to 0
  std::optional<Vec> mu0;     // defaults to 0

  void validate() const;
};

struct EpochRecord {
  Vec theta;  // theta_t: deployed model (proactive) or last inner iterate (reactive)
  Vec mu;     // mu_t: last inner iterate (proactive) or deployed action (reactive)
  double L = 0.0;
  double R = 0.0;
  double running_avg_L = 0.0;
  double running_avg_R = 0.0;
  // ||mu_t - mu_BR(theta_t)|| (proactive) or ||theta_t - theta_BR(mu_t)|| (reactive); NaN if unavailable.
  double br_gap = 0.0;
  // SR_L(theta_t) (proactive) or SR_R(mu_t) (reactive); NaN if no closed-form follower response.
  double stackelberg_risk = 0.0;
  // Proactive only: (1/tau) sum_j R(mu_{t,j}, theta_t) - min_mu R(mu, theta_t); NaN otherwise.
  double follower_regret = 0.0;
};

struct AbortInfo {
  long epoch = 0;
  std::string message;
};

struct Trace {
  Order order = Order::kProactive;
  std::vector<EpochRecord> epochs;
  Vec final_center;  // phi after the last zeroth-order update
  std::uint64_t rng_seed = 0;
  std::string config_digest;
  bool br_oracle_available = false;
  std::optional<AbortInfo> abort;

  bool completed() const { return !abort.has_value(); }
};

// Sees every fast-player iterate, including the epoch-initial one (j = 0).
using InnerObserver = std::function<void(long epoch, int j, const Vec& fast_iterate)>;

// Tolerances of the gradient-descent best-response oracle used when a game has no closed form.
struct BestResponseOracle {
  double eta = 0.1;
  double tol = 1e-8;
  int max_steps = 10000;
};

Trace run_proactive(const Game& game, const Schedule& schedule, std::uint64_t seed,
                    const InnerObserver& observer = {}, const BestResponseOracle& oracle = {});
Trace run_reactive(const Game& game, const Schedule& schedule, std::uint64_t seed,
                   const InnerObserver& observer = {}, const BestResponseOracle& oracle = {});
// Dispatches on schedule.order.
Trace run_dynamics(const Game& game, const Schedule& schedule, std::uint64_t seed,
                   const InnerObserver& observer = {}, const BestResponseOracle& oracle = {});

struct BrGapSeries {
  std::vector<double> gap;
  std::vector<double> running_avg;
};

// Throws DiagnosticUnavailable when the trace was recorded without a best-response oracle.
BrGapSeries br_gap_series(const Trace& trace);

struct GradientEstimate {
  double norm = 0.0;
  double std_error = 0.0;
  Vec gradient;
};

// Monte Carlo estimate of the gradient of the delta-smoothed function
// E_v[f(x + delta v)], v uniform in the unit ball, via the sphere identity
// (d/delta) E_u[f(x + delta u) u]. Draws come in antithetic pairs (u, -u).
GradientEstimate smoothed_gradient(const std::function<double(const Vec&)>& f, const Vec& x,
                                   double delta, long n_mc, Rng& rng);

// ||grad of smoothed SR_L|| at the final center of a proactive trace.
GradientEstimate stationarity_check(const Game& game, const Trace& trace, double delta, long n_mc,
                                    Rng& rng);

// SR_L(theta) = L(mu_BR(theta), theta) using the closed-form agent response when
// available, otherwise gradient descent on R.
double stackelberg_risk_L(const Game& game, const Vec& theta, const BestResponseOracle& oracle = {});

}  // namespace stackelberg
