#pragma once

#include <Eigen/Core>

namespace stackelberg {

// Models (theta), aggregate agent actions (mu) and features (x) all live in R^d.
using Vec = Eigen::VectorXd;

// Closed Euclidean ball {v : ||v||_2 <= radius} centred at the origin.
struct BallSet {
  double radius = 0.0;
  int dim = 1;

  static constexpr double kMembershipTol = 1e-12;

  bool contains(const Vec& v) const { return v.size() == dim && v.norm() <= radius + kMembershipTol; }
};

inline bool all_finite(const Vec& v) { return v.allFinite(); }

}  // namespace stackelberg
