#include "dynbc/mesh.hpp"

#include "dynbc/errors.hpp"

#include <atomic>
#include <string>

namespace dynbc {

namespace {

std::uint64_t next_mesh_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}

// Trapezoid weights on n nodes spanning [0, len]: h/2 at the ends, h inside.
Vector trapezoid_weights(int n, double h) {
  Vector w = Vector::Constant(n, h);
  w(0) = 0.5 * h;
  w(n - 1) = 0.5 * h;
  return w;
}

}  // namespace

Mesh build_interval_mesh(int n, double length) {
  if (n < 3) throw ConfigError("build_interval_mesh: need n >= 3 nodes, got " + std::to_string(n));
  if (!(length > 0.0)) throw ConfigError("build_interval_mesh: length must be positive");

  Mesh m;
  m.dim = 1;
  m.nx = n;
  m.ny = 1;
  m.lengths[0] = length;
  m.node_count = n;
  const double h = length / (n - 1);
  m.spacing[0] = h;
  m.node_coords.resize(n, 1);
  for (int i = 0; i < n; ++i) m.node_coords(i, 0) = i * h;
  m.interior_weights = trapezoid_weights(n, h);
  m.boundary_idx = {0, n - 1};
  m.boundary_weights = Vector::Ones(2);  // counting measure on the two endpoints
  m.domain_measure = m.interior_weights.sum();
  m.boundary_measure = m.boundary_weights.sum();
  m.id = next_mesh_id();
  return m;
}

Mesh build_rect_mesh(int nx, int ny, double lx, double ly) {
  if (nx < 3 || ny < 3)
    throw ConfigError("build_rect_mesh: need nx, ny >= 3 nodes per axis, got " +
                      std::to_string(nx) + "x" + std::to_string(ny));
  if (!(lx > 0.0) || !(ly > 0.0)) throw ConfigError("build_rect_mesh: side lengths must be positive");

  Mesh m;
  m.dim = 2;
  m.nx = nx;
  m.ny = ny;
  m.lengths[0] = lx;
  m.lengths[1] = ly;
  m.node_count = nx * ny;
  const double hx = lx / (nx - 1);
  const double hy = ly / (ny - 1);
  m.spacing[0] = hx;
  m.spacing[1] = hy;

  const Vector wx = trapezoid_weights(nx, hx);
  const Vector wy = trapezoid_weights(ny, hy);

  m.node_coords.resize(m.node_count, 2);
  m.interior_weights.resize(m.node_count);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const int idx = ix + nx * iy;
      m.node_coords(idx, 0) = ix * hx;
      m.node_coords(idx, 1) = iy * hy;
      m.interior_weights(idx) = wx(ix) * wy(iy);
    }
  }

  // Boundary quadrature: 1D trapezoid along each edge; corners collect the
  // two incident edge weights.
  std::vector<double> bw;
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const bool on_x = (ix == 0 || ix == nx - 1);
      const bool on_y = (iy == 0 || iy == ny - 1);
      if (!on_x && !on_y) continue;
      double w = 0.0;
      if (on_y) w += wx(ix);  // bottom/top edge, measured along x
      if (on_x) w += wy(iy);  // left/right edge, measured along y
      m.boundary_idx.push_back(ix + nx * iy);
      bw.push_back(w);
    }
  }
  m.boundary_weights = Eigen::Map<const Vector>(bw.data(), static_cast<Eigen::Index>(bw.size()));
  m.domain_measure = m.interior_weights.sum();
  m.boundary_measure = m.boundary_weights.sum();
  m.id = next_mesh_id();
  return m;
}

}  // namespace dynbc
