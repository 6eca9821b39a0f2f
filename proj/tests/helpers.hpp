// Shared oracles and generators for the unit and acceptance tests. Everything
// here is implemented independently of the library code it checks.
#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "cscp/rng.hpp"

namespace testing {

inline Eigen::MatrixXd random_matrix(int rows, int cols, cscp::RngStream& rng, double scale = 1.0) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = scale * rng.normal();
  return m;
}

inline Eigen::MatrixXd random_spd(int n, cscp::RngStream& rng, double ridge = 0.1) {
  const Eigen::MatrixXd m = random_matrix(n, n, rng);
  return m * m.transpose() / n + ridge * Eigen::MatrixXd::Identity(n, n);
}

/// Matrix exponential by scaling and squaring over a Taylor series; accurate
/// far beyond 1e-12 for the moderate norms used in these tests.
inline Eigen::MatrixXd expm(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  int squarings = 0;
  double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  while (norm > 0.25) {
    norm /= 2.0;
    ++squarings;
  }
  const Eigen::MatrixXd scaled = m / std::pow(2.0, squarings);
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  for (int k = 1; k <= 30; ++k) {
    term = term * scaled / k;
    result += term;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

/// Exact discrete process noise integral(0, dt) e^{Ac s} Qc e^{Ac' s} ds by
/// the Van Loan block-exponential construction.
inline Eigen::MatrixXd van_loan_q(const Eigen::MatrixXd& ac, const Eigen::MatrixXd& qc,
                                  double dt) {
  const int n = static_cast<int>(ac.rows());
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = -ac * dt;
  block.topRightCorner(n, n) = qc * dt;
  block.bottomRightCorner(n, n) = ac.transpose() * dt;
  const Eigen::MatrixXd e = expm(block);
  const Eigen::MatrixXd ad_t = e.bottomRightCorner(n, n);  // e^{Ac' dt}
  return ad_t.transpose() * e.topRightCorner(n, n);
}

/// Closed-form Kalman filter, the oracle for the sigma-point filter on
/// linear models.
struct KalmanOracle {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  void predict(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q) {
    mean = a * mean;
    cov = a * cov * a.transpose() + q;
  }

  void update(const Eigen::VectorXd& z, const Eigen::MatrixXd& c, const Eigen::MatrixXd& r) {
    const Eigen::MatrixXd s = c * cov * c.transpose() + r;
    const Eigen::MatrixXd gain = cov * c.transpose() * s.inverse();
    mean = mean + gain * (z - c * mean);
    cov = cov - gain * s * gain.transpose();
  }
};

/// Joint covariance of the stacked prediction-only trajectory
/// [theta_1; ...; theta_L] built directly from theta_l = A^l theta_0 +
/// sum_{i<=l} A^{l-i} w_i, independent of any recursion in the library.
inline Eigen::MatrixXd joint_trajectory_cov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q,
                                            const Eigen::MatrixXd& p0, int horizon) {
  const int n = static_cast<int>(a.rows());
  std::vector<Eigen::MatrixXd> a_pow(horizon + 1);
  a_pow[0] = Eigen::MatrixXd::Identity(n, n);
  for (int l = 1; l <= horizon; ++l) a_pow[l] = a * a_pow[l - 1];

  Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(horizon * n, horizon * n);
  for (int l = 1; l <= horizon; ++l) {
    for (int m = 1; m <= horizon; ++m) {
      Eigen::MatrixXd block = a_pow[l] * p0 * a_pow[m].transpose();
      for (int i = 1; i <= std::min(l, m); ++i)
        block += a_pow[l - i] * q * a_pow[m - i].transpose();
      joint.block((l - 1) * n, (m - 1) * n, n, n) = block;
    }
  }
  return joint;
}

}  // namespace testing
