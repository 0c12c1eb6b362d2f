#include "stackelberg/games.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "stackelberg/errors.hpp"
#include "stackelberg/rng.hpp"

namespace stackelberg {

void Game::check_dim(const Vec& v, const char* what) const {
  if (v.size() != dim()) {
    std::ostringstream msg;
    msg << name() << ": " << what << " has dimension " << v.size() << ", game expects " << dim();
    throw DimensionError(msg.str());
  }
}

void Game::check_dims(const Vec& mu, const Vec& theta) const {
  check_dim(mu, "mu");
  check_dim(theta, "theta");
}

double Game::loss_L(const Vec& mu, const Vec& theta) const {
  check_dims(mu, theta);
  return do_loss_L(mu, theta);
}

double Game::loss_R(const Vec& mu, const Vec& theta) const {
  check_dims(mu, theta);
  return do_loss_R(mu, theta);
}

Vec Game::grad_L_theta(const Vec& mu, const Vec& theta) const {
  check_dims(mu, theta);
  return do_grad_L_theta(mu, theta);
}

Vec Game::grad_L_mu(const Vec& mu, const Vec& theta) const {
  check_dims(mu, theta);
  return do_grad_L_mu(mu, theta);
}

Vec Game::grad_R_mu(const Vec& mu, const Vec& theta) const {
  check_dims(mu, theta);
  return do_grad_R_mu(mu, theta);
}

std::optional<Vec> Game::best_response_mu(const Vec& theta) const {
  check_dim(theta, "theta");
  return do_best_response_mu(theta);
}

std::optional<Vec> Game::best_response_theta(const Vec& mu) const {
  check_dim(mu, "mu");
  return do_best_response_theta(mu);
}

Vec Game::best_response_mu_vjp(const Vec& theta, const Vec& v) const {
  check_dims(v, theta);
  return do_best_response_mu_vjp(theta, v);
}

Vec Game::do_best_response_mu_vjp(const Vec&, const Vec&) const {
  throw DiagnosticUnavailable(name() + ": no closed-form agent best response");
}

namespace {

// mu_BR(theta) = B theta / ||theta||, the maximiser of mu^T theta on the B-ball.
Vec budget_best_response(const Vec& theta, double budget) {
  const double norm = theta.norm();
  if (norm == 0.0) return Vec::Zero(theta.size());
  return theta * (budget / norm);
}

// Jacobian of B theta/||theta|| is (B/||theta||)(I - theta theta^T/||theta||^2), symmetric.
Vec budget_best_response_vjp(const Vec& theta, const Vec& v, double budget) {
  const double norm = theta.norm();
  if (norm == 0.0) return Vec::Zero(theta.size());
  const Vec dir = theta / norm;
  return (budget / norm) * (v - dir * dir.dot(v));
}

}  // namespace

// --- LinearRegressionGame ---------------------------------------------------

LinearRegressionGame::LinearRegressionGame(Vec beta, double sigma2, double budget,
                                           double theta_radius)
    : Game(BallSet{theta_radius, static_cast<int>(beta.size())}),
      beta_(std::move(beta)),
      sigma2_(sigma2),
      budget_(budget) {
  if (beta_.size() < 1) throw ConfigError("linear: beta must have dimension >= 1");
  if (!all_finite(beta_)) throw ConfigError("linear: beta must be finite");
  if (!(sigma2_ >= 0.0)) throw ConfigError("linear: sigma2 must be >= 0");
  if (!(budget_ >= 0.0)) throw ConfigError("linear: budget B must be >= 0");
  if (!(theta_radius > 0.0)) throw ConfigError("linear: theta radius must be > 0");
}

double LinearRegressionGame::do_loss_L(const Vec& mu, const Vec& theta) const {
  const double shift = mu.dot(theta);
  return 0.5 * sigma2_ + 0.5 * (beta_ - theta).squaredNorm() + 0.5 * shift * shift;
}

double LinearRegressionGame::do_loss_R(const Vec& mu, const Vec& theta) const {
  return -mu.dot(theta);
}

Vec LinearRegressionGame::do_grad_L_theta(const Vec& mu, const Vec& theta) const {
  return (theta - beta_) + mu.dot(theta) * mu;
}

Vec LinearRegressionGame::do_grad_L_mu(const Vec& mu, const Vec& theta) const {
  return mu.dot(theta) * theta;
}

Vec LinearRegressionGame::do_grad_R_mu(const Vec&, const Vec& theta) const { return -theta; }

std::optional<Vec> LinearRegressionGame::do_best_response_mu(const Vec& theta) const {
  return budget_best_response(theta, budget_);
}

std::optional<Vec> LinearRegressionGame::do_best_response_theta(const Vec& mu) const {
  // (I + mu mu^T)^{-1} beta by Sherman-Morrison.
  return Vec(beta_ - mu * (mu.dot(beta_) / (1.0 + mu.squaredNorm())));
}

Vec LinearRegressionGame::do_best_response_mu_vjp(const Vec& theta, const Vec& v) const {
  return budget_best_response_vjp(theta, v, budget_);
}

std::optional<double> LinearRegressionGame::min_loss_R(const Vec& theta) const {
  check_dim(theta, "theta");
  return -budget_ * theta.norm();
}

// --- population ---------------------------------------------------------------

std::vector<LabeledSample> generate_population(const PopulationSpec& spec) {
  if (!(spec.p >= 0.0 && spec.p <= 1.0)) {
    std::ostringstream msg;
    msg << "population: p = " << spec.p << " outside [0, 1]";
    throw ConfigError(msg.str());
  }
  if (spec.n < 1) throw ConfigError("population: n must be >= 1");
  if (spec.alpha.size() < 1) throw ConfigError("population: alpha must have dimension >= 1");

  Rng rng = make_rng(spec.seed, spec.stream);
  std::bernoulli_distribution label(spec.p);
  std::normal_distribution<double> noise(0.0, 1.0);

  std::vector<LabeledSample> out;
  out.reserve(static_cast<std::size_t>(spec.n));
  const auto d = spec.alpha.size();
  for (int i = 0; i < spec.n; ++i) {
    LabeledSample s;
    s.y = label(rng) ? 1 : 0;
    s.x0 = (2.0 * s.y - 1.0) * spec.alpha;
    for (Eigen::Index k = 0; k < d; ++k) s.x0[k] += noise(rng);
    out.push_back(std::move(s));
  }
  return out;
}

// --- LogisticGame -------------------------------------------------------------

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

LogisticGame::LogisticGame(std::vector<LabeledSample> samples, AgentVariant variant,
                           double strength, double theta_radius)
    : Game(BallSet{theta_radius, samples.empty() ? 1 : static_cast<int>(samples.front().x0.size())}),
      samples_(std::move(samples)),
      variant_(variant),
      strength_(strength),
      dim_(samples_.empty() ? 0 : static_cast<int>(samples_.front().x0.size())) {
  if (samples_.empty()) throw ConfigError("logistic: needs at least one sample");
  for (const auto& s : samples_) {
    if (s.x0.size() != dim_) throw DimensionError("logistic: samples have inconsistent dimension");
    if (s.y != 0 && s.y != 1) throw ConfigError("logistic: labels must be 0 or 1");
  }
  if (variant_ == AgentVariant::kConstrained && !(strength_ >= 0.0))
    throw ConfigError("logistic: budget B must be >= 0");
  if (variant_ == AgentVariant::kCostly && !(strength_ > 0.0))
    throw ConfigError("logistic: lambda must be > 0");
  if (!(theta_radius > 0.0)) throw ConfigError("logistic: theta radius must be > 0");
  const auto n = static_cast<Eigen::Index>(samples_.size());
  features_.resize(n, dim_);
  labels_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = samples_[static_cast<std::size_t>(i)];
    features_.row(i) = s.x0.transpose();
    labels_[i] = s.y;
  }
  shifted_ = Vec::Ones(n) - labels_;
}

std::string LogisticGame::name() const {
  return variant_ == AgentVariant::kConstrained ? "logistic-constrained" : "logistic-costly";
}

std::optional<BallSet> LogisticGame::action_set() const {
  if (variant_ == AgentVariant::kConstrained) return BallSet{strength_, dim_};
  return std::nullopt;
}

double LogisticGame::do_loss_L(const Vec& mu, const Vec& theta) const {
  const Vec z = features_ * theta + mu.dot(theta) * shifted_;
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) total += softplus(z[i]) - labels_[i] * z[i];
  return total / static_cast<double>(z.size());
}

Vec LogisticGame::do_grad_L_theta(const Vec& mu, const Vec& theta) const {
  // d/dtheta [softplus(z) - y z] with z = (x0 + mu 1{y=0})^T theta.
  Vec z = features_ * theta + mu.dot(theta) * shifted_;
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = sigmoid(z[i]) - labels_[i];
  const double n = static_cast<double>(z.size());
  return (features_.transpose() * z + mu * shifted_.dot(z)) / n;
}

Vec LogisticGame::do_grad_L_mu(const Vec& mu, const Vec& theta) const {
  Vec z = features_ * theta + mu.dot(theta) * shifted_;
  double weight = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i)
    if (shifted_[i] != 0.0) weight += sigmoid(z[i]);
  return theta * (weight / static_cast<double>(z.size()));
}

double LogisticGame::do_loss_R(const Vec& mu, const Vec& theta) const {
  const double base = -mu.dot(theta);
  if (variant_ == AgentVariant::kCostly) return 0.5 * strength_ * mu.squaredNorm() + base;
  return base;
}

Vec LogisticGame::do_grad_R_mu(const Vec& mu, const Vec& theta) const {
  if (variant_ == AgentVariant::kCostly) return strength_ * mu - theta;
  return -theta;
}

std::optional<Vec> LogisticGame::do_best_response_mu(const Vec& theta) const {
  if (variant_ == AgentVariant::kCostly) return Vec(theta / strength_);
  return budget_best_response(theta, strength_);
}

Vec LogisticGame::do_best_response_mu_vjp(const Vec& theta, const Vec& v) const {
  if (variant_ == AgentVariant::kCostly) return v / strength_;
  return budget_best_response_vjp(theta, v, strength_);
}

std::optional<double> LogisticGame::min_loss_R(const Vec& theta) const {
  check_dim(theta, "theta");
  if (variant_ == AgentVariant::kCostly) return -theta.squaredNorm() / (2.0 * strength_);
  return -strength_ * theta.norm();
}

std::optional<double> LogisticGame::agent_pl_constant() const {
  if (variant_ == AgentVariant::kCostly) return strength_;
  return std::nullopt;
}

std::optional<double> LogisticGame::agent_smoothness() const {
  if (variant_ == AgentVariant::kCostly) return strength_;
  return 0.0;
}

}  // namespace stackelberg
