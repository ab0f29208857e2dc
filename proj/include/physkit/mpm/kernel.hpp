#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>

namespace physkit::mpm {

/// Quadratic B-spline N(r) for a node at signed distance r (in cells).
inline double quadratic_bspline(double r) {
  const double a = std::abs(r);
  if (a < 0.5) return 0.75 - a * a;
  if (a < 1.5) return 0.5 * (1.5 - a) * (1.5 - a);
  return 0.0;
}

/// 3x3x3 stencil of a particle: lowest node index, fractional offset from it
/// (in cells) and per-axis weights.
struct QuadraticStencil {
  std::array<int, 3> base{};
  Eigen::Vector3d fx = Eigen::Vector3d::Zero();
  std::array<std::array<double, 3>, 3> w{};  // w[axis][offset]

  double weight(int i, int j, int k) const { return w[0][i] * w[1][j] * w[2][k]; }
  /// x_node - x_particle in world units.
  Eigen::Vector3d dpos(int i, int j, int k, double dx) const {
    return (Eigen::Vector3d(i, j, k) - fx) * dx;
  }
};

/// `grid_pos` is the particle position relative to node 0, in cells.
inline QuadraticStencil quadratic_stencil(const Eigen::Vector3d& grid_pos) {
  QuadraticStencil s;
  for (int a = 0; a < 3; ++a) {
    s.base[a] = static_cast<int>(std::floor(grid_pos[a] - 0.5));
    const double f = grid_pos[a] - s.base[a];
    s.fx[a] = f;
    s.w[a][0] = 0.5 * (1.5 - f) * (1.5 - f);
    s.w[a][1] = 0.75 - (f - 1.0) * (f - 1.0);
    s.w[a][2] = 0.5 * (f - 0.5) * (f - 0.5);
  }
  return s;
}

}  // namespace physkit::mpm
