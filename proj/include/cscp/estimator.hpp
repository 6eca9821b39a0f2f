#pragma once

#include <vector>

#include <Eigen/Dense>

#include "cscp/basis.hpp"
#include "cscp/dynamics.hpp"
#include "cscp/rng.hpp"
#include "cscp/workspace.hpp"

namespace cscp {

enum class BeliefPhase { Updated, Predicted };

/// Gaussian belief over the threat state at a time index.
struct GaussianBelief {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  int time_index{0};
  BeliefPhase phase{BeliefPhase::Updated};
};

/// Configuration-dependent linear measurement model z = C theta + eta,
/// eta ~ N(0, R). Row j of C is Phi at sensor j's grid point.
struct MeasurementModel {
  std::vector<int> config;
  Eigen::MatrixXd C;
  Eigen::MatrixXd R;

  int num_sensors() const { return static_cast<int>(config.size()); }
};

MeasurementModel measurement_matrix(const std::vector<int>& config, const BasisSet& basis,
                                    const Workspace& ws, double sigma_r2);

Eigen::VectorXd simulate_measurement(const ThreatTruth& truth, const MeasurementModel& model,
                                     RngStream& rng);

/// Sigma-point scaling constants. lambda = alpha^2 (N + kappa) - N over the
/// augmented dimension N.
struct UkfParams {
  double alpha{1e-3};
  double beta{2.0};
  double kappa{0.0};
};

/// Extra outputs of the measurement update, consumed by the convergence
/// margin diagnostic.
struct UkfUpdateInfo {
  Eigen::MatrixXd gain;
  Eigen::MatrixXd innovation_cov;
};

/// Augmented-state sigma-point prediction: points drawn over [theta; w]
/// and propagated through theta <- A theta + w.
GaussianBelief ukf_predict(const GaussianBelief& belief, const LinearDynamics& dyn,
                           const UkfParams& params);

/// Augmented-state sigma-point update: points drawn over [theta; eta] and
/// pushed through z = C theta + eta.
GaussianBelief ukf_update(const GaussianBelief& belief, const Eigen::VectorXd& z,
                          const MeasurementModel& model, const UkfParams& params,
                          UkfUpdateInfo* info = nullptr);

}  // namespace cscp
