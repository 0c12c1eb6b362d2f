#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stackelberg/rng.hpp"
#include "stackelberg/types.hpp"

namespace stackelberg {

// Two-player loss structure. The decision-maker picks theta and suffers
// L(mu, theta); the agents pick the aggregate action mu and suffer R(mu, theta).
//
// Public entry points validate dimensions and forward to the do_* hooks, so
// implementations may assume well-formed inputs.
class Game {
 public:
  virtual ~Game() = default;

  virtual int dim() const = 0;
  virtual std::string name() const = 0;

  double loss_L(const Vec& mu, const Vec& theta) const;
  double loss_R(const Vec& mu, const Vec& theta) const;
  Vec grad_L_theta(const Vec& mu, const Vec& theta) const;
  Vec grad_L_mu(const Vec& mu, const Vec& theta) const;
  Vec grad_R_mu(const Vec& mu, const Vec& theta) const;

  // Feasible models. Deployed models may leave this set by the perturbation radius.
  const BallSet& theta_set() const { return theta_set_; }
  // Feasible agent actions; nullopt when unconstrained.
  virtual std::optional<BallSet> action_set() const = 0;

  // Closed-form best responses, when the game has one.
  std::optional<Vec> best_response_mu(const Vec& theta) const;
  std::optional<Vec> best_response_theta(const Vec& mu) const;
  // J_BR(theta)^T v for the closed-form agent best response. Only meaningful
  // when best_response_mu is available.
  Vec best_response_mu_vjp(const Vec& theta, const Vec& v) const;

  // min_mu R(mu, theta) in closed form, when available.
  virtual std::optional<double> min_loss_R(const Vec& /*theta*/) const { return std::nullopt; }

  // Strength of the agents' PL inequality (gamma) and smoothness of R in mu,
  // when they are known constants.
  virtual std::optional<double> agent_pl_constant() const { return std::nullopt; }
  virtual std::optional<double> agent_smoothness() const { return std::nullopt; }

 protected:
  explicit Game(BallSet theta_set) : theta_set_(theta_set) {}

  virtual double do_loss_L(const Vec& mu, const Vec& theta) const = 0;
  virtual double do_loss_R(const Vec& mu, const Vec& theta) const = 0;
  virtual Vec do_grad_L_theta(const Vec& mu, const Vec& theta) const = 0;
  virtual Vec do_grad_L_mu(const Vec& mu, const Vec& theta) const = 0;
  virtual Vec do_grad_R_mu(const Vec& mu, const Vec& theta) const = 0;
  virtual std::optional<Vec> do_best_response_mu(const Vec&) const { return std::nullopt; }
  virtual std::optional<Vec> do_best_response_theta(const Vec&) const { return std::nullopt; }
  virtual Vec do_best_response_mu_vjp(const Vec& theta, const Vec& v) const;

  void check_dims(const Vec& mu, const Vec& theta) const;
  void check_dim(const Vec& v, const char* what) const;

 private:
  BallSet theta_set_;
};

inline constexpr double kDefaultThetaRadius = 10.0;

// Agents shift every feature vector by mu within a budget ball of radius B;
// the decision-maker runs least squares on y = x0^T beta + noise with
// E[x0 x0^T] = I. All expectations are available in closed form:
//   L(mu, theta) = sigma2/2 + ||beta - theta||^2/2 + (mu^T theta)^2/2
//   R(mu, theta) = -mu^T theta
class LinearRegressionGame final : public Game {
 public:
  LinearRegressionGame(Vec beta, double sigma2, double budget,
                       double theta_radius = kDefaultThetaRadius);

  int dim() const override { return static_cast<int>(beta_.size()); }
  std::string name() const override { return "linear"; }
  std::optional<BallSet> action_set() const override { return BallSet{budget_, dim()}; }
  std::optional<double> min_loss_R(const Vec& theta) const override;

  const Vec& beta() const { return beta_; }
  double sigma2() const { return sigma2_; }
  double budget() const { return budget_; }

 protected:
  double do_loss_L(const Vec& mu, const Vec& theta) const override;
  double do_loss_R(const Vec& mu, const Vec& theta) const override;
  Vec do_grad_L_theta(const Vec& mu, const Vec& theta) const override;
  Vec do_grad_L_mu(const Vec& mu, const Vec& theta) const override;
  Vec do_grad_R_mu(const Vec& mu, const Vec& theta) const override;
  std::optional<Vec> do_best_response_mu(const Vec& theta) const override;
  std::optional<Vec> do_best_response_theta(const Vec& mu) const override;
  Vec do_best_response_mu_vjp(const Vec& theta, const Vec& v) const override;

 private:
  Vec beta_;
  double sigma2_;
  double budget_;
};

struct LabeledSample {
  Vec x0;
  int y = 0;  // {0, 1}
};

// y ~ Bern(p), x0 | y ~ N((2y - 1) alpha, I).
struct PopulationSpec {
  double p = 0.5;
  Vec alpha;
  int n = 100;
  std::uint64_t seed = 0;
  Stream stream = Stream::kData;
};

std::vector<LabeledSample> generate_population(const PopulationSpec& spec);

enum class AgentVariant {
  kConstrained,  // ||mu|| <= B, R = -mu^T theta
  kCostly,       // R = lambda/2 ||mu||^2 - mu^T theta, mu unconstrained
};

// Logistic regression on a frozen sample set; negatively labelled agents
// shift their features by mu (x = x0 + mu 1{y=0}).
class LogisticGame final : public Game {
 public:
  // `strength` is the budget B for kConstrained and the penalty lambda for kCostly.
  LogisticGame(std::vector<LabeledSample> samples, AgentVariant variant, double strength,
               double theta_radius = kDefaultThetaRadius);

  int dim() const override { return dim_; }
  std::string name() const override;
  std::optional<BallSet> action_set() const override;
  std::optional<double> min_loss_R(const Vec& theta) const override;
  std::optional<double> agent_pl_constant() const override;
  std::optional<double> agent_smoothness() const override;

  AgentVariant variant() const { return variant_; }
  double strength() const { return strength_; }
  const std::vector<LabeledSample>& samples() const { return samples_; }

 protected:
  double do_loss_L(const Vec& mu, const Vec& theta) const override;
  double do_loss_R(const Vec& mu, const Vec& theta) const override;
  Vec do_grad_L_theta(const Vec& mu, const Vec& theta) const override;
  Vec do_grad_L_mu(const Vec& mu, const Vec& theta) const override;
  Vec do_grad_R_mu(const Vec& mu, const Vec& theta) const override;
  std::optional<Vec> do_best_response_mu(const Vec& theta) const override;
  Vec do_best_response_mu_vjp(const Vec& theta, const Vec& v) const override;

 private:
  std::vector<LabeledSample> samples_;
  AgentVariant variant_;
  double strength_;
  int dim_;
  Eigen::MatrixXd features_;  // n x d, rows are x0
  Vec labels_;                // y
  Vec shifted_;               // 1 - y: rows moved by mu
};

// log(1 + e^z) without overflow.
double softplus(double z);
// 1 / (1 + e^-z) without overflow.
double sigmoid(double z);

}  // namespace stackelberg
