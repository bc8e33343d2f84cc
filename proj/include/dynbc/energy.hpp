#pragma once

#include "dynbc/model.hpp"
#include "dynbc/operators.hpp"

namespace dynbc {

// E(u) = 1/2 u'Ku + mu/2 u'M_bnd u + sum_i w_i F(u_i). Lyapunov functional of
// the flow; exact discrete gradient below.
double energy(const Field& u, const Operators& ops, const ModelSpec& model);

// grad E = K u + mu M_bnd u + M_int f(u).
Vector energy_gradient(const Field& u, const Operators& ops, const ModelSpec& model);

// sqrt(u'Ku + u'M_bnd u); equivalent H1 norm (boundary term controls constants).
double h1_norm(const Field& u, const Operators& ops);
double h1_dist(const Field& a, const Field& b, const Operators& ops);

// sqrt(r' (K + M_bnd)^{-1} r), solved by CG to relative residual 1e-12.
double dual_norm(const Vector& r, const Operators& ops);

struct L2Norms {
  double interior = 0.0;
  double boundary = 0.0;
};
L2Norms l2_norms(const Field& u, const Operators& ops);

struct LpNorms {
  double interior = 0.0;
  double boundary = 0.0;
};
// Quadrature p-norms, p >= 1.
LpNorms lp_norms(const Field& u, const Operators& ops, double p);

}  // namespace dynbc
