#include "cscp/basis.hpp"

#include <cmath>
#include <stdexcept>

namespace cscp {

void BasisSet::validate(const Workspace& ws) const {
  if (centers.size() != widths.size())
    throw std::invalid_argument("basis: centers/widths size mismatch");
  for (double a : widths)
    if (!(a > 0.0)) throw std::invalid_argument("basis: widths must be positive");
  for (const auto& c : centers)
    if (!ws.contains(c)) throw std::invalid_argument("basis: center outside workspace");
  if (!(support_threshold > 0.0 && support_threshold < 1.0) && support_threshold != 1.0)
    throw std::invalid_argument("basis: support_threshold must be in (0, 1]");
}

BasisSet BasisSet::uniform(int per_side, const Workspace& ws, double width,
                           double support_threshold) {
  if (per_side < 1) throw std::invalid_argument("basis: per_side must be >= 1");
  BasisSet b;
  b.support_threshold = support_threshold;
  const double spacing =
      per_side > 1 ? 2.0 * ws.half_extent / (per_side - 1) : 2.0 * ws.half_extent;
  if (width <= 0.0) width = spacing * spacing / 6.0;
  for (int row = 0; row < per_side; ++row) {
    for (int col = 0; col < per_side; ++col) {
      const double x = per_side > 1 ? -ws.half_extent + col * spacing : 0.0;
      const double y = per_side > 1 ? -ws.half_extent + row * spacing : 0.0;
      b.centers.emplace_back(x, y);
      b.widths.push_back(width);
    }
  }
  return b;
}

Eigen::VectorXd basis_eval(const Eigen::Vector2d& x, const BasisSet& basis) {
  Eigen::VectorXd phi(basis.size());
  for (int n = 0; n < basis.size(); ++n) {
    const double d2 = (x - basis.centers[n]).squaredNorm();
    phi[n] = std::exp(-d2 / (2.0 * basis.widths[n]));
  }
  return phi;
}

double field_value(const Eigen::Vector2d& x, const Eigen::VectorXd& theta,
                   const BasisSet& basis) {
  if (theta.size() != basis.size())
    throw std::invalid_argument("field_value: theta dimension mismatch");
  return 1.0 + basis_eval(x, basis).dot(theta);
}

Eigen::VectorXd basis_laplacian(const Eigen::Vector2d& x, const BasisSet& basis) {
  Eigen::VectorXd lap(basis.size());
  for (int n = 0; n < basis.size(); ++n) {
    const double a = basis.widths[n];
    const double d2 = (x - basis.centers[n]).squaredNorm();
    lap[n] = std::exp(-d2 / (2.0 * a)) * (d2 - 2.0 * a) / (a * a);
  }
  return lap;
}

std::vector<int> significant_support(int n, const BasisSet& basis, const Workspace& ws) {
  if (n < 0 || n >= basis.size())
    throw std::out_of_range("significant_support: basis index out of range");
  std::vector<int> support;
  for (int i = 0; i < ws.num_points(); ++i) {
    const double d2 = (ws.point(i) - basis.centers[n]).squaredNorm();
    if (std::exp(-d2 / (2.0 * basis.widths[n])) >= basis.support_threshold)
      support.push_back(i);
  }
  return support;
}

}  // namespace cscp
