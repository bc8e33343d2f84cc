#pragma once

// Reference computations for the test suite. Everything here goes through a
// different route than the library: dense factorizations instead of iterative
// solvers, direct stencil sums instead of assembled matrices, and scalar
// recursions instead of the vector integrator.

#include "dynbc/operators.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

using dynbc::SpMat;
using dynbc::Vector;

inline Eigen::MatrixXd dense(const SpMat& A) { return Eigen::MatrixXd(A); }

// Dense LDLT solve of (K + diag(m_bnd)) x = r, then sqrt(r'x).
inline double dual_norm(const Vector& r, const dynbc::Operators& ops) {
  Eigen::MatrixXd A = dense(ops.stiffness);
  A.diagonal() += ops.m_bnd;
  const Vector x = A.ldlt().solve(r);
  return std::sqrt(r.dot(x));
}

// Smallest eigenvalue of A v = lambda diag(b) v by the dense generalized
// self-adjoint solver.
inline double pencil_smallest(const SpMat& A, const Vector& b_diag) {
  const Eigen::MatrixXd Ad = dense(A);
  const Eigen::MatrixXd Bd = Eigen::MatrixXd(b_diag.asDiagonal());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Ad, Bd);
  return es.eigenvalues()(0);
}

// u'Ku on an interval mesh, summed cell by cell without touching the matrix.
inline double stencil_energy_1d(const Vector& u, double h) {
  double s = 0.0;
  for (Eigen::Index i = 0; i + 1 < u.size(); ++i) {
    const double d = u(i + 1) - u(i);
    s += d * d / h;
  }
  return s;
}

// u'Ku on a rect mesh (node index ix + nx*iy): per-line difference quotients
// weighted by the transverse trapezoid rule.
inline double stencil_energy_2d(const Vector& u, int nx, int ny, double hx, double hy) {
  auto wline = [](int n, double h, int i) { return (i == 0 || i == n - 1) ? 0.5 * h : h; };
  double s = 0.0;
  for (int iy = 0; iy < ny; ++iy) {
    const double wy = wline(ny, hy, iy);
    for (int ix = 0; ix + 1 < nx; ++ix) {
      const double d = u(ix + 1 + nx * iy) - u(ix + nx * iy);
      s += wy * d * d / hx;
    }
  }
  for (int ix = 0; ix < nx; ++ix) {
    const double wx = wline(nx, hx, ix);
    for (int iy = 0; iy + 1 < ny; ++iy) {
      const double d = u(ix + nx * (iy + 1)) - u(ix + nx * iy);
      s += wx * d * d / hy;
    }
  }
  return s;
}

// Central difference (g(e) - g(-e)) / (2e) for a scalar functional along a
// direction; the caller supplies g(t) = E(u + t v).
template <typename G>
double central_diff(G&& g, double eps) {
  return (g(eps) - g(-eps)) / (2.0 * eps);
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

inline LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  LineFit out;
  const size_t n = xs.size();
  if (n < 2) return out;
  double sx = 0, sy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / static_cast<double>(n), my = sy / static_cast<double>(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  out.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return out;
}

// Boundary-free scalar limit of the semi-implicit step from a constant state:
// away from the boundary rows (where the extra boundary mass perturbs the
// solve) the update is c+ = c - dt f(c). Nodes deep inside the mesh follow
// this recursion up to an exponentially small boundary layer.
template <typename F>
double scalar_semi_implicit(double c, double dt, int steps, F&& f) {
  for (int i = 0; i < steps; ++i) c = c - dt * f(c);
  return c;
}

}  // namespace oracle
