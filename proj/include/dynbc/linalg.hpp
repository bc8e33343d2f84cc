#pragma once

#include "dynbc/operators.hpp"

#include <optional>

namespace dynbc {

struct CgResult {
  Vector x;
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
};

// Jacobi-preconditioned conjugate gradients for SPD A. Stops when
// ||b - A x|| <= tol * ||b||; b = 0 returns x = 0 immediately.
CgResult cg_solve(const SpMat& A, const Vector& b, double tol, int max_iter,
                  const Vector* x0 = nullptr);

// Same, but throws NumericalError if the tolerance is not reached.
Vector cg_solve_or_throw(const SpMat& A, const Vector& b, double tol, int max_iter,
                         const char* what, const Vector* x0 = nullptr);

struct PencilEig {
  double value = 0.0;
  Vector vec;
  int iterations = 0;
  double residual = 0.0;  // ||A v - value B v|| / ||A v||
};

// Smallest eigenvalue of the symmetric pencil A v = lambda B v with B a
// positive diagonal, by inverse power iteration: v <- (A - shift B)^{-1} B v.
// The caller must pick shift strictly below the smallest eigenvalue so that
// A - shift B is SPD (factored once with a sparse Cholesky).
PencilEig smallest_pencil_eig(const SpMat& A, const Vector& b_diag, double shift,
                              double tol, int max_iter);

}  // namespace dynbc
