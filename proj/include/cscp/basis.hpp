#pragma once

#include <vector>

#include <Eigen/Dense>

#include "cscp/workspace.hpp"

namespace cscp {

/// Isotropic Gaussian basis functions phi_n(x) = exp(-|x - c_n|^2 / (2 a_n)).
/// Note a_n scales the squared distance directly (it is not squared again).
struct BasisSet {
  std::vector<Eigen::Vector2d> centers;
  std::vector<double> widths;
  double support_threshold{0.1};

  int size() const { return static_cast<int>(centers.size()); }

  void validate(const Workspace& ws) const;

  /// per_side^2 centers uniformly spaced over the closed workspace. If
  /// width <= 0 a default of spacing^2/6 is used, which keeps neighboring
  /// basis functions below exp(-3) of each other at adjacent centers while
  /// the significant-support regions still cover the workspace.
  static BasisSet uniform(int per_side, const Workspace& ws, double width = 0.0,
                          double support_threshold = 0.1);
};

/// Evaluates all basis functions at x; components lie in (0, 1].
Eigen::VectorXd basis_eval(const Eigen::Vector2d& x, const BasisSet& basis);

/// Field intensity c(x) = 1 + Phi(x)' theta.
double field_value(const Eigen::Vector2d& x, const Eigen::VectorXd& theta,
                   const BasisSet& basis);

/// Analytic Laplacian of each basis function:
/// lap phi_n = phi_n * (|x - c_n|^2 - 2 a_n) / a_n^2.
Eigen::VectorXd basis_laplacian(const Eigen::Vector2d& x, const BasisSet& basis);

/// Grid indices where phi_n exceeds the support threshold.
std::vector<int> significant_support(int n, const BasisSet& basis, const Workspace& ws);

}  // namespace cscp
