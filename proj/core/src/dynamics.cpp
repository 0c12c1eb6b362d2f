#include "stackelberg/dynamics.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "stackelberg/errors.hpp"
#include "stackelberg/rng.hpp"

namespace stackelberg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Vec initial_or_zero(const std::optional<Vec>& v, const Game& game, const char* what) {
  if (!v) return Vec::Zero(game.dim());
  if (v->size() != game.dim()) {
    std::ostringstream msg;
    msg << "schedule: " << what << " has dimension " << v->size() << ", game expects " << game.dim();
    throw DimensionError(msg.str());
  }
  return *v;
}

// Best response of the agents to theta: closed form, or gradient descent on R warm-started at `hint`.
Vec agent_best_response(const Game& game, const Vec& theta, const Vec& hint,
                        const BestResponseOracle& oracle) {
  if (auto br = game.best_response_mu(theta)) return *std::move(br);
  return descend_R_mu(game, theta, hint, oracle.eta, oracle.tol, oracle.max_steps).point;
}

Vec dm_best_response(const Game& game, const Vec& mu, const Vec& hint,
                     const BestResponseOracle& oracle) {
  if (auto br = game.best_response_theta(mu)) return *std::move(br);
  return descend_L_theta(game, mu, hint, oracle.eta, oracle.tol, oracle.max_steps).point;
}

bool finite_record(const EpochRecord& rec) {
  return all_finite(rec.theta) && all_finite(rec.mu) && std::isfinite(rec.L) &&
         std::isfinite(rec.R);
}

// Appends `rec` with running averages; returns false (and marks the abort) on non-finite values.
bool append_epoch(Trace& trace, EpochRecord rec, long t, double& sum_L, double& sum_R) {
  if (!finite_record(rec)) {
    trace.abort = AbortInfo{t, "non-finite iterate or loss"};
    return false;
  }
  sum_L += rec.L;
  sum_R += rec.R;
  rec.running_avg_L = sum_L / static_cast<double>(t);
  rec.running_avg_R = sum_R / static_cast<double>(t);
  trace.epochs.push_back(std::move(rec));
  return true;
}

}  // namespace

const char* to_string(Order order) {
  return order == Order::kProactive ? "proactive" : "reactive";
}

const char* to_string(IterateMode mode) {
  return mode == IterateMode::kAveraged ? "averaged" : "last";
}

void Schedule::validate() const {
  if (T < 1) throw ConfigError("schedule: T must be >= 1");
  if (tau < 1) throw ConfigError("schedule: tau must be >= 1");
  if (!(fast_eta >= 0.0) || !std::isfinite(fast_eta))
    throw ConfigError("schedule: fast step must be >= 0");
  slow.validate();
}

Trace run_proactive(const Game& game, const Schedule& schedule, std::uint64_t seed,
                    const InnerObserver& observer, const BestResponseOracle& oracle) {
  if (schedule.order != Order::kProactive)
    throw ConfigError("run_proactive: schedule order must be proactive");
  schedule.validate();

  const std::optional<BallSet> action_set = game.action_set();
  Rng rng = make_rng(seed, Stream::kSphere);

  Trace trace;
  trace.order = Order::kProactive;
  trace.rng_seed = seed;
  trace.br_oracle_available = true;
  trace.epochs.reserve(static_cast<std::size_t>(schedule.T));

  ZeroOrderState state =
      make_zero_order_state(initial_or_zero(schedule.theta0, game, "theta0"), game.theta_set(), rng);
  Vec mu = initial_or_zero(schedule.mu0, game, "mu0");
  if (action_set) mu = project_ball(mu, *action_set);
  const bool closed_form_br = game.best_response_mu(Vec::Zero(game.dim())).has_value();

  double sum_L = 0.0;
  double sum_R = 0.0;
  for (long t = 1; t <= schedule.T; ++t) {
    const Vec theta = deployed_point(state, schedule.slow);

    // Fast player: tau projected gradient steps, warm-started from the previous epoch.
    if (observer) observer(t, 0, mu);
    Vec mu_sum = Vec::Zero(game.dim());
    double inner_R = 0.0;
    for (int j = 1; j <= schedule.tau; ++j) {
      mu = agent_gd_step(game, mu, theta, schedule.fast_eta, action_set);
      mu_sum += mu;
      inner_R += game.loss_R(mu, theta);
      if (observer) observer(t, j, mu);
    }
    const Vec mu_bar = mu_sum / static_cast<double>(schedule.tau);
    const Vec& observed_mu = schedule.iterate_mode == IterateMode::kAveraged ? mu_bar : mu;

    EpochRecord rec;
    rec.theta = theta;
    rec.mu = mu;
    rec.L = game.loss_L(mu, theta);
    rec.R = game.loss_R(mu, theta);

    const Vec br = agent_best_response(game, theta, mu, oracle);
    rec.br_gap = (mu - br).norm();
    rec.stackelberg_risk = closed_form_br ? game.loss_L(br, theta) : kNaN;
    const std::optional<double> min_R = game.min_loss_R(theta);
    rec.follower_regret =
        min_R ? inner_R / static_cast<double>(schedule.tau) - *min_R : kNaN;

    const double observed_loss =
        schedule.iterate_mode == IterateMode::kAveraged ? game.loss_L(observed_mu, theta) : rec.L;
    if (!append_epoch(trace, std::move(rec), t, sum_L, sum_R)) break;

    state = zero_order_step(state, observed_loss, schedule.slow, game.theta_set(), rng);
    if (!all_finite(state.phi)) {
      trace.abort = AbortInfo{t, "non-finite decision-maker center"};
      break;
    }
  }
  trace.final_center = state.phi;
  return trace;
}

Trace run_reactive(const Game& game, const Schedule& schedule, std::uint64_t seed,
                   const InnerObserver& observer, const BestResponseOracle& oracle) {
  if (schedule.order != Order::kReactive)
    throw ConfigError("run_reactive: schedule order must be reactive");
  schedule.validate();

  const std::optional<BallSet> action_set = game.action_set();
  // Unconstrained agents still need a bounded set for the zeroth-order projection.
  const BallSet agent_set = action_set.value_or(game.theta_set());
  Rng rng = make_rng(seed, Stream::kSphere);

  Trace trace;
  trace.order = Order::kReactive;
  trace.rng_seed = seed;
  trace.br_oracle_available = true;
  trace.epochs.reserve(static_cast<std::size_t>(schedule.T));

  ZeroOrderState state =
      make_zero_order_state(initial_or_zero(schedule.mu0, game, "mu0"), agent_set, rng);
  Vec theta = project_ball(initial_or_zero(schedule.theta0, game, "theta0"), game.theta_set());
  const bool closed_form_br = game.best_response_theta(Vec::Zero(game.dim())).has_value();

  double sum_L = 0.0;
  double sum_R = 0.0;
  for (long t = 1; t <= schedule.T; ++t) {
    const Vec mu = deployed_point(state, schedule.slow);

    if (observer) observer(t, 0, theta);
    Vec theta_sum = Vec::Zero(game.dim());
    for (int j = 1; j <= schedule.tau; ++j) {
      theta = dm_gd_step(game, mu, theta, schedule.fast_eta, game.theta_set());
      theta_sum += theta;
      if (observer) observer(t, j, theta);
    }
    const Vec theta_bar = theta_sum / static_cast<double>(schedule.tau);

    EpochRecord rec;
    rec.theta = theta;
    rec.mu = mu;
    rec.L = game.loss_L(mu, theta);
    rec.R = game.loss_R(mu, theta);

    const Vec br = dm_best_response(game, mu, theta, oracle);
    rec.br_gap = (theta - br).norm();
    rec.stackelberg_risk = closed_form_br ? game.loss_R(mu, br) : kNaN;
    rec.follower_regret = kNaN;

    const double observed_loss = schedule.iterate_mode == IterateMode::kAveraged
                                     ? game.loss_R(mu, theta_bar)
                                     : rec.R;
    if (!append_epoch(trace, std::move(rec), t, sum_L, sum_R)) break;

    state = zero_order_step(state, observed_loss, schedule.slow, agent_set, rng);
    if (!all_finite(state.phi)) {
      trace.abort = AbortInfo{t, "non-finite agent center"};
      break;
    }
  }
  trace.final_center = state.phi;
  return trace;
}

Trace run_dynamics(const Game& game, const Schedule& schedule, std::uint64_t seed,
                   const InnerObserver& observer, const BestResponseOracle& oracle) {
  if (schedule.order == Order::kProactive)
    return run_proactive(game, schedule, seed, observer, oracle);
  return run_reactive(game, schedule, seed, observer, oracle);
}

BrGapSeries br_gap_series(const Trace& trace) {
  if (!trace.br_oracle_available)
    throw DiagnosticUnavailable("br_gap_series: trace has no best-response oracle");
  BrGapSeries out;
  out.gap.reserve(trace.epochs.size());
  out.running_avg.reserve(trace.epochs.size());
  double sum = 0.0;
  for (const auto& rec : trace.epochs) {
    out.gap.push_back(rec.br_gap);
    sum += rec.br_gap;
    out.running_avg.push_back(sum / static_cast<double>(out.gap.size()));
  }
  return out;
}

GradientEstimate smoothed_gradient(const std::function<double(const Vec&)>& f, const Vec& x,
                                   double delta, long n_mc, Rng& rng) {
  if (n_mc < 1) throw ConfigError("smoothed_gradient: n_mc must be >= 1");
  if (!(delta > 0.0)) throw ConfigError("smoothed_gradient: delta must be > 0");
  const int dim = static_cast<int>(x.size());
  const double scale = static_cast<double>(dim) / delta;

  // Each antithetic pair contributes (d / 2 delta)(f(x + delta u) - f(x - delta u)) u,
  // which has the same expectation as (d / delta) f(x + delta u) u.
  Vec mean = Vec::Zero(dim);
  Vec m2 = Vec::Zero(dim);
  for (long i = 0; i < n_mc; ++i) {
    const Vec u = sample_sphere(dim, rng);
    const Vec sample = 0.5 * scale * (f(x + delta * u) - f(x - delta * u)) * u;
    // Welford update per coordinate.
    const Vec diff = sample - mean;
    mean += diff / static_cast<double>(i + 1);
    m2 += diff.cwiseProduct(sample - mean);
  }
  GradientEstimate out;
  out.gradient = mean;
  out.norm = mean.norm();
  const double total_var = n_mc > 1 ? m2.sum() / static_cast<double>(n_mc - 1) : 0.0;
  out.std_error = std::sqrt(total_var / static_cast<double>(n_mc));
  return out;
}

double stackelberg_risk_L(const Game& game, const Vec& theta, const BestResponseOracle& oracle) {
  const Vec br = agent_best_response(game, theta, Vec::Zero(game.dim()), oracle);
  return game.loss_L(br, theta);
}

GradientEstimate stationarity_check(const Game& game, const Trace& trace, double delta, long n_mc,
                                    Rng& rng) {
  if (trace.order != Order::kProactive)
    throw ConfigError("stationarity_check: needs a proactive trace");
  if (trace.final_center.size() != game.dim())
    throw DimensionError("stationarity_check: trace does not match game dimension");
  return smoothed_gradient([&](const Vec& theta) { return stackelberg_risk_L(game, theta); },
                           trace.final_center, delta, n_mc, rng);
}

}  // namespace stackelberg
