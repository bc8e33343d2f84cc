#include "dynbc/operators.hpp"

#include "dynbc/errors.hpp"

#include <string>
#include <vector>

namespace dynbc {

namespace {

// 1D stiffness contributions of one cell of width h between nodes a and b,
// scaled by `scale` (the transverse quadrature weight in 2D, 1 in 1D). This
// is the piecewise-linear Dirichlet energy, so u'Ku is exact for linear u.
void add_cell(std::vector<Eigen::Triplet<double>>& trip, int a, int b, double h, double scale) {
  const double k = scale / h;
  trip.emplace_back(a, a, k);
  trip.emplace_back(b, b, k);
  trip.emplace_back(a, b, -k);
  trip.emplace_back(b, a, -k);
}

}  // namespace

Operators assemble_operators(const Mesh& mesh) {
  Operators ops;
  ops.mesh_id = mesh.id;
  ops.node_count = mesh.node_count;
  ops.dim = mesh.dim;
  ops.boundary_idx = mesh.boundary_idx;

  std::vector<Eigen::Triplet<double>> trip;
  if (mesh.dim == 1) {
    trip.reserve(4 * (mesh.nx - 1));
    for (int i = 0; i + 1 < mesh.nx; ++i) add_cell(trip, i, i + 1, mesh.spacing[0], 1.0);
  } else {
    // Tensor construction Kx (x) My + Mx (x) Ky with lumped transverse mass:
    // the 5-point stencil that keeps K 1 = 0 and linear Dirichlet energies exact.
    const int nx = mesh.nx, ny = mesh.ny;
    trip.reserve(8 * static_cast<size_t>(mesh.node_count));
    auto wline = [](int n, double h, int i) { return (i == 0 || i == n - 1) ? 0.5 * h : h; };
    for (int iy = 0; iy < ny; ++iy) {
      const double wy = wline(ny, mesh.spacing[1], iy);
      for (int ix = 0; ix + 1 < nx; ++ix)
        add_cell(trip, ix + nx * iy, ix + 1 + nx * iy, mesh.spacing[0], wy);
    }
    for (int ix = 0; ix < nx; ++ix) {
      const double wx = wline(nx, mesh.spacing[0], ix);
      for (int iy = 0; iy + 1 < ny; ++iy)
        add_cell(trip, ix + nx * iy, ix + nx * (iy + 1), mesh.spacing[1], wx);
    }
  }

  ops.stiffness.resize(mesh.node_count, mesh.node_count);
  ops.stiffness.setFromTriplets(trip.begin(), trip.end());
  ops.stiffness.makeCompressed();

  ops.m_int = mesh.interior_weights;
  ops.m_bnd = Vector::Zero(mesh.node_count);
  for (size_t j = 0; j < mesh.boundary_idx.size(); ++j)
    ops.m_bnd(mesh.boundary_idx[j]) = mesh.boundary_weights(static_cast<Eigen::Index>(j));
  ops.m_dyn = ops.m_int + ops.m_bnd;

  SpMat bnd_diag(mesh.node_count, mesh.node_count);
  std::vector<Eigen::Triplet<double>> btrip;
  for (int idx : mesh.boundary_idx) btrip.emplace_back(idx, idx, ops.m_bnd(idx));
  bnd_diag.setFromTriplets(btrip.begin(), btrip.end());
  ops.h1_matrix = ops.stiffness + bnd_diag;
  ops.h1_matrix.makeCompressed();
  return ops;
}

void require_same_mesh(const Field& u, const Operators& ops, const char* where) {
  if (u.mesh_id != ops.mesh_id)
    throw ConfigError(std::string(where) + ": field belongs to a different mesh");
  if (u.values.size() != ops.node_count)
    throw ConfigError(std::string(where) + ": field size " + std::to_string(u.values.size()) +
                      " does not match operator size " + std::to_string(ops.node_count));
}

Vector trace(const Field& u, const Operators& ops) {
  require_same_mesh(u, ops, "trace");
  Vector out(static_cast<Eigen::Index>(ops.boundary_idx.size()));
  for (size_t j = 0; j < ops.boundary_idx.size(); ++j)
    out(static_cast<Eigen::Index>(j)) = u.values(ops.boundary_idx[j]);
  return out;
}

double boundary_l2(const Vector& boundary_values, const Operators& ops) {
  if (boundary_values.size() != static_cast<Eigen::Index>(ops.boundary_idx.size()))
    throw ConfigError("boundary_l2: value count does not match boundary node count");
  double s = 0.0;
  for (size_t j = 0; j < ops.boundary_idx.size(); ++j) {
    const double w = ops.m_bnd(ops.boundary_idx[j]);
    const double v = boundary_values(static_cast<Eigen::Index>(j));
    s += w * v * v;
  }
  return std::sqrt(s);
}

}  // namespace dynbc
