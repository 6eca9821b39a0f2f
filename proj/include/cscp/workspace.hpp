#pragma once

#include <stdexcept>

#include <Eigen/Dense>

namespace cscp {

/// Square workspace [-h, h]^2 with a uniform grid of grid_side^2 points.
/// Grid indices are 0-based and row-major with the origin at the bottom-left
/// corner: index i has column i % grid_side (x, left to right) and row
/// i / grid_side (y, bottom to top).
struct Workspace {
  double half_extent{1.0};
  int grid_side{7};

  Workspace() = default;
  Workspace(double half_extent_, int grid_side_)
      : half_extent(half_extent_), grid_side(grid_side_) {
    if (grid_side < 2) throw std::invalid_argument("workspace: grid_side must be >= 2");
    if (half_extent <= 0.0) throw std::invalid_argument("workspace: half_extent must be > 0");
  }

  int num_points() const { return grid_side * grid_side; }

  /// Spacing between adjacent grid points.
  double delta() const { return 2.0 * half_extent / (grid_side - 1); }

  Eigen::Vector2d point(int i) const {
    const int row = i / grid_side;
    const int col = i % grid_side;
    return {-half_extent + col * delta(), -half_extent + row * delta()};
  }

  bool contains(const Eigen::Vector2d& x) const {
    return x.x() >= -half_extent && x.x() <= half_extent &&
           x.y() >= -half_extent && x.y() <= half_extent;
  }
};

}  // namespace cscp
