#include "cscp/estimator.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace cscp {

MeasurementModel measurement_matrix(const std::vector<int>& config, const BasisSet& basis,
                                    const Workspace& ws, double sigma_r2) {
  if (config.empty()) throw std::invalid_argument("measurement_matrix: empty configuration");
  std::set<int> seen;
  for (int q : config) {
    if (q < 0 || q >= ws.num_points())
      throw std::invalid_argument("measurement_matrix: grid index out of range");
    if (!seen.insert(q).second)
      throw std::invalid_argument("measurement_matrix: duplicate grid index");
  }
  MeasurementModel model;
  model.config = config;
  model.C.resize(static_cast<int>(config.size()), basis.size());
  for (int j = 0; j < static_cast<int>(config.size()); ++j)
    model.C.row(j) = basis_eval(ws.point(config[j]), basis).transpose();
  model.R = sigma_r2 * Eigen::MatrixXd::Identity(config.size(), config.size());
  return model;
}

Eigen::VectorXd simulate_measurement(const ThreatTruth& truth, const MeasurementModel& model,
                                     RngStream& rng) {
  return model.C * truth.theta +
         robust_cholesky(model.R) * rng.normal_vector(model.num_sensors());
}

namespace {

struct SigmaWeights {
  double scale;  // sqrt(N + lambda)
  double w0_mean;
  double w0_cov;
  double wi;  // shared by all non-central points
};

SigmaWeights sigma_weights(int n_aug, const UkfParams& p) {
  const double lambda = p.alpha * p.alpha * (n_aug + p.kappa) - n_aug;
  SigmaWeights w;
  w.scale = std::sqrt(n_aug + lambda);
  w.w0_mean = lambda / (n_aug + lambda);
  w.w0_cov = w.w0_mean + (1.0 - p.alpha * p.alpha + p.beta);
  w.wi = 0.5 / (n_aug + lambda);
  return w;
}

// Mean and covariance of transformed sigma points. `points` holds the
// central point in column 0 followed by 2n symmetric points. The mean is
// accumulated in deviation form around the central point, which avoids the
// large cancellation the near-unity central weight would otherwise cause.
void unscented_moments(const Eigen::MatrixXd& points, const SigmaWeights& w,
                       Eigen::VectorXd& mean, Eigen::MatrixXd& cov) {
  const Eigen::Index cols = points.cols();
  Eigen::VectorXd drift = Eigen::VectorXd::Zero(points.rows());
  for (Eigen::Index i = 1; i < cols; ++i) drift += w.wi * (points.col(i) - points.col(0));
  mean = points.col(0) + drift;
  cov = w.w0_cov * drift * drift.transpose();
  for (Eigen::Index i = 1; i < cols; ++i) {
    const Eigen::VectorXd e = points.col(i) - mean;
    cov += w.wi * e * e.transpose();
  }
  cov = 0.5 * (cov + cov.transpose()).eval();
}

}  // namespace

GaussianBelief ukf_predict(const GaussianBelief& belief, const LinearDynamics& dyn,
                           const UkfParams& params) {
  if (belief.phase != BeliefPhase::Updated)
    throw std::invalid_argument("ukf_predict: belief must be updated-phase");
  const int np = dyn.dim();
  if (belief.mean.size() != np)
    throw std::invalid_argument("ukf_predict: belief dimension mismatch");

  // Augmented state [theta; w] with block-diagonal covariance diag(P, Q).
  const int n_aug = 2 * np;
  const SigmaWeights w = sigma_weights(n_aug, params);
  const Eigen::MatrixXd l_state = robust_cholesky(belief.cov);
  const Eigen::MatrixXd l_noise = robust_cholesky(dyn.Q);

  Eigen::MatrixXd propagated(np, 2 * n_aug + 1);
  propagated.col(0) = dyn.A * belief.mean;
  for (int i = 0; i < n_aug; ++i) {
    Eigen::VectorXd d_state = Eigen::VectorXd::Zero(np);
    Eigen::VectorXd d_noise = Eigen::VectorXd::Zero(np);
    if (i < np)
      d_state = w.scale * l_state.col(i);
    else
      d_noise = w.scale * l_noise.col(i - np);
    propagated.col(1 + i) = dyn.A * (belief.mean + d_state) + d_noise;
    propagated.col(1 + n_aug + i) = dyn.A * (belief.mean - d_state) - d_noise;
  }

  GaussianBelief out;
  unscented_moments(propagated, w, out.mean, out.cov);
  out.time_index = belief.time_index + 1;
  out.phase = BeliefPhase::Predicted;
  return out;
}

GaussianBelief ukf_update(const GaussianBelief& belief, const Eigen::VectorXd& z,
                          const MeasurementModel& model, const UkfParams& params,
                          UkfUpdateInfo* info) {
  if (belief.phase != BeliefPhase::Predicted)
    throw std::invalid_argument("ukf_update: belief must be predicted-phase");
  const int np = static_cast<int>(belief.mean.size());
  const int ns = model.num_sensors();
  if (z.size() != ns) throw std::invalid_argument("ukf_update: measurement size mismatch");
  if (model.C.cols() != np) throw std::invalid_argument("ukf_update: model dimension mismatch");

  // Augmented state [theta; eta] with block-diagonal covariance diag(P, R).
  const int n_aug = np + ns;
  const SigmaWeights w = sigma_weights(n_aug, params);
  const Eigen::MatrixXd l_state = robust_cholesky(belief.cov);
  const Eigen::MatrixXd l_noise = robust_cholesky(model.R);

  Eigen::MatrixXd state_pts(np, 2 * n_aug + 1);
  Eigen::MatrixXd meas_pts(ns, 2 * n_aug + 1);
  state_pts.col(0) = belief.mean;
  meas_pts.col(0) = model.C * belief.mean;
  for (int i = 0; i < n_aug; ++i) {
    Eigen::VectorXd d_state = Eigen::VectorXd::Zero(np);
    Eigen::VectorXd d_noise = Eigen::VectorXd::Zero(ns);
    if (i < np)
      d_state = w.scale * l_state.col(i);
    else
      d_noise = w.scale * l_noise.col(i - np);
    state_pts.col(1 + i) = belief.mean + d_state;
    state_pts.col(1 + n_aug + i) = belief.mean - d_state;
    meas_pts.col(1 + i) = model.C * (belief.mean + d_state) + d_noise;
    meas_pts.col(1 + n_aug + i) = model.C * (belief.mean - d_state) - d_noise;
  }

  Eigen::VectorXd z_hat;
  Eigen::MatrixXd p_zz;
  unscented_moments(meas_pts, w, z_hat, p_zz);

  Eigen::MatrixXd p_tz = Eigen::MatrixXd::Zero(np, ns);
  {
    Eigen::VectorXd z_drift = z_hat - meas_pts.col(0);
    p_tz += w.w0_cov * (state_pts.col(0) - belief.mean) * (-z_drift).transpose();
    for (int i = 1; i < 2 * n_aug + 1; ++i)
      p_tz += w.wi * (state_pts.col(i) - belief.mean) * (meas_pts.col(i) - z_hat).transpose();
  }

  Eigen::LLT<Eigen::MatrixXd> llt(p_zz);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("ukf_update: innovation covariance not positive definite");
  const Eigen::MatrixXd gain = llt.solve(p_tz.transpose()).transpose();

  GaussianBelief out;
  out.mean = belief.mean + gain * (z - z_hat);
  out.cov = belief.cov - gain * p_zz * gain.transpose();
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  out.time_index = belief.time_index;
  out.phase = BeliefPhase::Updated;
  if (info) {
    info->gain = gain;
    info->innovation_cov = p_zz;
  }
  return out;
}

}  // namespace cscp
