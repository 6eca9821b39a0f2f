#pragma once

#include <vector>

#include <Eigen/Dense>

#include "cscp/basis.hpp"
#include "cscp/dynamics.hpp"
#include "cscp/estimator.hpp"
#include "cscp/workspace.hpp"

namespace cscp {

/// 4-connected grid graph between a start and a goal grid index.
struct GridGraph {
  Workspace ws;
  int start{0};
  int goal{0};

  std::vector<int> neighbors(int v) const;
};

/// Prediction-only statistics over a planning horizon. Stage 0 is the belief
/// itself; stage l is l chained prediction steps. Cross-covariances follow
/// linear propagation: P_{lm} = P_l (A^{m-l})' for m > l, and the
/// cross-covariance of stage l against the measurement-time state is A^l P_0.
struct PathHorizonStats {
  std::vector<Eigen::VectorXd> means;   // stage 0..L
  std::vector<Eigen::MatrixXd> covs;    // stage 0..L
  std::vector<Eigen::MatrixXd> a_pow;   // A^0..A^L

  int horizon() const { return static_cast<int>(means.size()) - 1; }

  Eigen::MatrixXd cross(int l, int m) const;   // P_{lm}, l <= m
  Eigen::MatrixXd cross_base(int l) const;     // cov(theta_l, theta_0) = A^l P_0
};

PathHorizonStats predict_horizon(const GaussianBelief& belief, const LinearDynamics& dyn,
                                 int steps);

/// Planned path with its cost statistics.
struct PathPlan {
  std::vector<int> vertices;  // v_0 .. v_L
  double j_hat{0.0};
  double var_j{0.0};
  double risk{0.0};
  std::vector<int> relevant_set;

  int steps() const { return static_cast<int>(vertices.size()) - 1; }
};

/// Expected path cost delta * (L + sum_l Phi(x_{v_l})' thetahat_l), l = 1..L.
double path_cost_mean(const std::vector<int>& vertices, const PathHorizonStats& stats,
                      const BasisSet& basis, const Workspace& ws);

/// Path cost variance
/// delta^2 sum_l Phi_l' P_l Phi_l + 2 delta^2 sum_{l<m} Phi_l' P_{lm} Phi_m,
/// clamped at zero from below after accumulation.
double path_cost_variance(const std::vector<int>& vertices, const PathHorizonStats& stats,
                          const BasisSet& basis, const Workspace& ws);

double risk_of(double j_hat, double var_j);

/// Basis indices whose significant-support region intersects the path.
std::vector<int> path_relevant_set(const std::vector<int>& vertices, const BasisSet& basis,
                                   const Workspace& ws);

/// Minimum-expected-exposure search on the time-expanded graph over
/// (vertex, step) states. Stage costs are delta * max(chat(x, l), c_floor)
/// with chat evaluated at the stage-l predicted mean; the reported j_hat
/// uses the unfloored formula. Equal-cost ties resolve to the
/// lexicographically smallest vertex sequence.
PathPlan plan_min_expected_cost(const GridGraph& graph, const GaussianBelief& belief,
                                const LinearDynamics& dyn, const BasisSet& basis,
                                int horizon_cap, double c_floor = 1e-3);

}  // namespace cscp
