#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cscp/basis.hpp"
#include "cscp/dynamics.hpp"
#include "cscp/estimator.hpp"
#include "cscp/placement.hpp"
#include "cscp/planner.hpp"
#include "cscp/rng.hpp"
#include "cscp/workspace.hpp"

namespace cscp {

enum class Method { Crmi, Smi, CrmiGreedy, SmiGreedy, CrmiReconfig };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

/// Full description of one CSCP problem instance.
struct Scenario {
  Workspace ws;
  BasisSet basis;
  LinearDynamics dyn;
  int start{0};
  int goal{0};

  int num_sensors{2};
  double sigma_r2{0.01};
  std::vector<int> initial_config;  // default: first num_sensors grid indices

  Method method{Method::Crmi};
  double alpha1{0.0};
  double alpha2{0.0};

  double epsilon{0.1};
  int max_iterations{200};

  double chi{1e3};
  UkfParams ukf;
  int horizon_cap{0};  // 0 -> 4 * grid_side^2
  double c_floor{1e-3};

  double theta_min{0.0};
  double theta_max{4.0};
  long exhaustive_budget{2'000'000};

  void validate() const;
  int effective_horizon_cap() const {
    return horizon_cap > 0 ? horizon_cap : 4 * ws.grid_side * ws.grid_side;
  }
  std::vector<int> effective_initial_config() const;
};

/// Per-iteration record of a CSCP run. Record 0 captures the initial
/// optimistic plan before any measurement; records k >= 1 capture the state
/// after the k-th measurement-and-replan iteration.
struct IterationRecord {
  int k{0};
  std::vector<int> config;
  Eigen::VectorXd z;
  Eigen::VectorXd theta_hat;
  Eigen::MatrixXd cov;          // updated-phase covariance
  Eigen::VectorXd theta_true;
  double trace_p{0.0};
  std::vector<int> path;
  double j_hat{0.0};
  double true_j{0.0};
  double var_j{0.0};
  double risk{0.0};
  double objective{0.0};   // value of the placement objective at the chosen config
  double margin{0.0};      // convergence-criterion margin (diagnostic only)
  double travel{0.0};      // assignment distance from the previous config
  double millis{0.0};
};

enum class RunStatus { Converged, MaxIterations, Error };

struct CscpTrace {
  std::vector<IterationRecord> records;
  RunStatus status{RunStatus::Error};
  double cumulative_travel{0.0};
  long objective_evaluations{0};
  std::string error;

  const IterationRecord& terminal() const { return records.back(); }
  int iterations_to_converge() const { return terminal().k; }
};

/// Algorithm driver: place sensors, measure, update the belief, replan,
/// until Var[J] falls below epsilon or the iteration cap is hit.
CscpTrace run(const Scenario& scenario, RngBundle& rngs);

/// tr(L C P-) - tr(A P A' - P + Q): nonnegative values indicate the
/// measurement update removed at least as much uncertainty as prediction
/// added. Logged each iteration, never used to halt.
double convergence_margin(const Eigen::MatrixXd& p_prev_updated,
                          const Eigen::MatrixXd& p_predicted, const Eigen::MatrixXd& gain,
                          const Eigen::MatrixXd& c, const Eigen::MatrixXd& a,
                          const Eigen::MatrixXd& q);

/// Minimum-total-distance assignment between the old and new sensor
/// locations (configurations are unordered sets).
double reconfiguration_travel(const std::vector<int>& previous, const std::vector<int>& next,
                              const Workspace& ws);

/// Per-iteration travel distances of a completed trace (record 0 contributes
/// nothing) plus the cumulative sum.
std::pair<std::vector<double>, double> sensor_travel(const CscpTrace& trace);

}  // namespace cscp
