#include "cscp/dynamics.hpp"

#include <stdexcept>

namespace cscp {

LinearDynamics discretize(const Eigen::MatrixXd& Ac, const Eigen::MatrixXd& Qc,
                          double dt, int order) {
  if (Ac.rows() != Ac.cols()) throw std::invalid_argument("discretize: Ac must be square");
  if (Qc.rows() != Qc.cols() || Qc.rows() != Ac.rows())
    throw std::invalid_argument("discretize: Qc dimension mismatch");
  if (order < 1) throw std::invalid_argument("discretize: order must be >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("discretize: dt must be > 0");

  const Eigen::Index n = Ac.rows();
  LinearDynamics dyn;
  dyn.Ac = Ac;
  dyn.Qc = Qc;
  dyn.dt = dt;
  dyn.order = order;

  // A term j: Ac^j dt^j / j!.  Q term j (j >= 1): M_j dt^j / j! with
  // M_1 = Qc and M_{j+1} = Ac M_j + M_j Ac', the Taylor expansion of
  // int_0^dt exp(Ac s) Qc exp(Ac' s) ds.
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd a_term = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd m_term = Qc;
  double factor = 1.0;
  for (int j = 1; j <= order; ++j) {
    factor *= dt / j;
    a_term = (Ac * a_term).eval();
    A += factor * a_term;
    Q += factor * m_term;
    m_term = (Ac * m_term + m_term * Ac.transpose()).eval();
  }
  dyn.A = A;
  dyn.Q = 0.5 * (Q + Q.transpose());
  return dyn;
}

Eigen::MatrixXd heat_diffusion_Ac(const BasisSet& basis, double alpha,
                                  std::vector<Eigen::Vector2d> collocation) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("heat_diffusion_Ac: alpha must be >= 0");
  if (collocation.empty()) collocation = basis.centers;
  const int np = basis.size();
  const int m = static_cast<int>(collocation.size());
  if (m < np) throw std::invalid_argument("heat_diffusion_Ac: too few collocation points");

  Eigen::MatrixXd G(m, np);    // G(i, n) = phi_n at collocation point i
  Eigen::MatrixXd Lap(m, np);  // alpha * lap(phi_n) at collocation point i
  for (int i = 0; i < m; ++i) {
    G.row(i) = basis_eval(collocation[i], basis).transpose();
    Lap.row(i) = alpha * basis_laplacian(collocation[i], basis).transpose();
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(G);
  if (qr.rank() < np)
    throw std::invalid_argument("heat_diffusion_Ac: rank-deficient collocation matrix");
  return qr.solve(Lap);
}

Eigen::MatrixXd robust_cholesky(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  if (m.isZero(0.0)) return Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  double jitter = 0.0;
  for (int attempt = 0; attempt < 6; ++attempt) {
    Eigen::LLT<Eigen::MatrixXd> llt(
        sym + jitter * Eigen::MatrixXd::Identity(n, n));
    if (llt.info() == Eigen::Success) return llt.matrixL();
    jitter = jitter == 0.0 ? 1e-12 : jitter * 10.0;
  }
  throw std::runtime_error("robust_cholesky: factorization failed after jitter escalation");
}

ThreatTruth step_truth(const ThreatTruth& truth, const LinearDynamics& dyn, RngStream& rng) {
  if (truth.theta.size() != dyn.dim())
    throw std::invalid_argument("step_truth: theta dimension mismatch");
  ThreatTruth next;
  next.theta = dyn.A * truth.theta + robust_cholesky(dyn.Q) * rng.normal_vector(dyn.dim());
  next.time_index = truth.time_index + 1;
  return next;
}

Eigen::VectorXd draw_initial_theta(const BasisSet& basis, const Workspace& ws,
                                   double lo, double hi, RngStream& rng) {
  constexpr int kLatticeSide = 41;
  const double step = 2.0 * ws.half_extent / (kLatticeSide - 1);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Eigen::VectorXd theta(basis.size());
    for (int n = 0; n < basis.size(); ++n) theta[n] = rng.uniform(lo, hi);
    bool positive = true;
    for (int r = 0; r < kLatticeSide && positive; ++r)
      for (int c = 0; c < kLatticeSide && positive; ++c) {
        const Eigen::Vector2d x(-ws.half_extent + c * step, -ws.half_extent + r * step);
        if (field_value(x, theta, basis) <= 0.0) positive = false;
      }
    if (positive) return theta;
  }
  throw std::runtime_error("draw_initial_theta: could not draw a positive field");
}

}  // namespace cscp
