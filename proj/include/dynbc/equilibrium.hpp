#pragma once

#include "dynbc/energy.hpp"

#include <cstdint>
#include <vector>

namespace dynbc {

struct EquilibriumRecord {
  Field psi;
  double energy = 0.0;
  double grad_dual = 0.0;     // dual norm of the gradient at psi
  double hess_min_eig = 0.0;  // smallest eigenvalue of the Hessian pencil vs M_dyn
  bool nondegenerate = false; // hess_min_eig > 1e-8
  int iterations = 0;
};

// Newton with residual-halving line search on K u + mu M_bnd u + M_int f(u) = 0.
// Throws SolverError on divergence (carries last residual and iteration count).
EquilibriumRecord solve_stationary(const Field& guess, const Operators& ops,
                                   const ModelSpec& model, double tol = 1e-10);

// Armijo gradient descent in the M_dyn metric, finished by a Newton polish;
// the returned record satisfies dual_norm(gradient) <= tol.
EquilibriumRecord minimize_energy(const Field& guess, const Operators& ops,
                                  const ModelSpec& model, double tol = 1e-10);

bool check_critical_point(const Field& u, const Operators& ops, const ModelSpec& model,
                          double tol = 1e-10);

// Robin-compatible companion: Delta w = Delta u in the interior rows,
// homogeneous Robin closure on the boundary rows, i.e.
// (K + M_bnd) w = K u with the boundary rows of the data dropped.
Field robin_lift(const Field& u, const Operators& ops);

// Neumann-compatible companion: -Delta w + w = -Delta u + u in the interior
// rows, zero weak flux on the boundary rows.
Field neumann_lift(const Field& u, const Operators& ops);

// Discrete weak normal derivative plus mu * trace: per boundary node,
// (K u + M_int f(u))_i / w_bnd_i + mu u_i. Zero (up to solver tolerance) at
// discrete equilibria and equal to -trace(u_t) + O(h) along trajectories.
Vector boundary_flux_defect(const Field& u, const Operators& ops, const ModelSpec& model);

// Seeded multistart guesses: constants at the real roots of f and +-0.1
// perturbations, then low-mode Fourier fields (splitmix64 stream).
std::vector<Field> multistart_guesses(const Mesh& mesh, const ModelSpec& model,
                                      int count, std::uint64_t seed);

}  // namespace dynbc
