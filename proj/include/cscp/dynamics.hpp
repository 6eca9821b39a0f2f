#pragma once

#include <vector>

#include <Eigen/Dense>

#include "cscp/basis.hpp"
#include "cscp/rng.hpp"

namespace cscp {

/// Linear threat dynamics theta_k = A theta_{k-1} + w, w ~ N(0, Q), obtained
/// from the continuous-time pair (A_c, Q_c) by series discretization.
struct LinearDynamics {
  Eigen::MatrixXd Ac;
  Eigen::MatrixXd Qc;
  double dt{1.0};
  int order{2};
  Eigen::MatrixXd A;
  Eigen::MatrixXd Q;

  int dim() const { return static_cast<int>(A.rows()); }
};

/// Truncated series discretization:
///   A = I + A_c dt + A_c^2 dt^2/2! + ...
///   Q = Q_c dt + (A_c Q_c + Q_c A_c') dt^2/2! + ...
/// Both series are truncated after the dt^order term; Q is symmetrized.
LinearDynamics discretize(const Eigen::MatrixXd& Ac, const Eigen::MatrixXd& Qc,
                          double dt, int order);

/// Continuous-time dynamics matrix for the heat-diffusion field model,
/// obtained by least-squares projection of alpha * lap(Phi) onto the basis
/// over the collocation points (defaults to the basis centers when empty).
Eigen::MatrixXd heat_diffusion_Ac(const BasisSet& basis, double alpha,
                                  std::vector<Eigen::Vector2d> collocation = {});

/// Lower Cholesky factor with escalating diagonal jitter (1e-12 up) on
/// factorization failure. Returns the zero matrix for a zero input.
Eigen::MatrixXd robust_cholesky(const Eigen::MatrixXd& m);

/// Current true threat state.
struct ThreatTruth {
  Eigen::VectorXd theta;
  int time_index{0};
};

/// One dynamics step: theta <- A theta + sample from N(0, Q).
ThreatTruth step_truth(const ThreatTruth& truth, const LinearDynamics& dyn, RngStream& rng);

/// Draws theta_0 i.i.d. uniform on [lo, hi], resampled until the field
/// 1 + Phi' theta is strictly positive on a fixed 41x41 reference lattice
/// (so the same draw is valid for any desk-scale grid resolution).
Eigen::VectorXd draw_initial_theta(const BasisSet& basis, const Workspace& ws,
                                   double lo, double hi, RngStream& rng);

}  // namespace cscp
