#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace dynbc {

using Vector = Eigen::VectorXd;

// Tensor-product nodal mesh on an interval or a rectangle. interior_weights
// are trapezoid quadrature weights for integrals over the domain (defined at
// every node, including boundary nodes); boundary_weights quadrature for
// integrals over the boundary, aligned with boundary_idx.
struct Mesh {
  int dim = 1;
  int nx = 0;
  int ny = 1;  // 1 in 1D
  double lengths[2] = {1.0, 1.0};
  double spacing[2] = {0.0, 0.0};
  int node_count = 0;
  Eigen::MatrixXd node_coords;     // node_count x dim, node index = ix + nx*iy
  std::vector<int> boundary_idx;   // sorted ascending
  Vector interior_weights;         // length node_count
  Vector boundary_weights;         // length boundary_idx.size()
  double domain_measure = 0.0;
  double boundary_measure = 0.0;
  std::uint64_t id = 0;            // unique per built mesh, for cross-checks
};

// n >= 3 nodes on [0, length], length > 0.
Mesh build_interval_mesh(int n, double length);

// nx, ny >= 3 nodes per axis on [0, lx] x [0, ly].
Mesh build_rect_mesh(int nx, int ny, double lx, double ly);

}  // namespace dynbc
