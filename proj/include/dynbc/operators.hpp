#pragma once

#include "dynbc/field.hpp"
#include "dynbc/mesh.hpp"

#include <Eigen/SparseCore>

#include <vector>

namespace dynbc {

using SpMat = Eigen::SparseMatrix<double>;

// Discrete operators for the weak form: stiffness K (symmetric, K·1 = 0,
// natural boundary closure), lumped interior mass m_int (trapezoid weights at
// all nodes), lumped boundary mass m_bnd (boundary quadrature weights at
// boundary nodes, zero elsewhere), and m_dyn = m_int + m_bnd. h1_matrix is
// K + diag(m_bnd), cached because the dual norm, the lambda pencil and the
// Robin lift all solve with it.
struct Operators {
  std::uint64_t mesh_id = 0;
  int node_count = 0;
  int dim = 1;
  SpMat stiffness;
  Vector m_int;
  Vector m_bnd;
  Vector m_dyn;
  SpMat h1_matrix;
  std::vector<int> boundary_idx;
};

Operators assemble_operators(const Mesh& mesh);

// Boundary values of u in boundary_idx order.
Vector trace(const Field& u, const Operators& ops);

// L2(boundary) norm of a vector of per-boundary-node values.
double boundary_l2(const Vector& boundary_values, const Operators& ops);

void require_same_mesh(const Field& u, const Operators& ops, const char* where);

}  // namespace dynbc
