#include "dynbc/linalg.hpp"

#include "dynbc/errors.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <cstdio>
#include <string>

namespace dynbc {

namespace {

std::string fmt_e(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

}  // namespace

CgResult cg_solve(const SpMat& A, const Vector& b, double tol, int max_iter, const Vector* x0) {
  CgResult res;
  if (b.norm() == 0.0) {
    res.x = Vector::Zero(b.size());
    res.converged = true;
    return res;
  }

  // Jacobi-preconditioned CG; convergence is judged by the residual recurrence,
  // the standard criterion (the true residual floors out near eps*cond(A)).
  Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(tol);
  cg.setMaxIterations(max_iter);
  cg.compute(A);
  res.x = x0 ? cg.solveWithGuess(b, *x0).eval() : cg.solve(b).eval();
  res.iterations = static_cast<int>(cg.iterations());
  res.rel_residual = cg.error();
  res.converged = cg.info() == Eigen::Success && res.x.allFinite();
  return res;
}

Vector cg_solve_or_throw(const SpMat& A, const Vector& b, double tol, int max_iter,
                         const char* what, const Vector* x0) {
  CgResult res = cg_solve(A, b, tol, max_iter, x0);
  if (!res.converged)
    throw NumericalError(std::string(what) + ": CG did not reach relative residual " + fmt_e(tol) +
                         " (got " + fmt_e(res.rel_residual) + " after " +
                         std::to_string(res.iterations) + " iterations)");
  return std::move(res.x);
}

PencilEig smallest_pencil_eig(const SpMat& A, const Vector& b_diag, double shift,
                              double tol, int max_iter) {
  const Eigen::Index n = A.rows();
  SpMat shifted = A;
  if (shift != 0.0) {
    SpMat D(n, n);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) trip.emplace_back(i, i, -shift * b_diag(i));
    D.setFromTriplets(trip.begin(), trip.end());
    shifted = A + D;
  }

  Eigen::SimplicialLLT<SpMat> llt(shifted);
  if (llt.info() != Eigen::Success)
    throw NumericalError("smallest_pencil_eig: shifted matrix is not positive definite (shift " +
                         fmt_e(shift) + ")");

  Vector v = Vector::Ones(n);
  v /= std::sqrt(v.dot(b_diag.cwiseProduct(v)));
  PencilEig out;
  for (int it = 1; it <= max_iter; ++it) {
    Vector w = llt.solve(b_diag.cwiseProduct(v));
    const double bnorm = std::sqrt(w.dot(b_diag.cwiseProduct(w)));
    if (!(bnorm > 0.0) || !w.allFinite())
      throw NumericalError("smallest_pencil_eig: iteration produced a degenerate vector");
    v = w / bnorm;
    const Vector Av = A * v;
    const double value = v.dot(Av) / v.dot(b_diag.cwiseProduct(v));
    const Vector resid = Av - value * b_diag.cwiseProduct(v);
    const double rel = resid.norm() / Av.norm();
    out.value = value;
    out.iterations = it;
    out.residual = rel;
    if (rel <= tol) {
      out.vec = v;
      return out;
    }
  }
  throw NumericalError("smallest_pencil_eig: no convergence after " + std::to_string(max_iter) +
                       " iterations (relative residual " + fmt_e(out.residual) + ")");
}

}  // namespace dynbc
