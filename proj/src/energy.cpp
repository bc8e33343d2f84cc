#include "dynbc/energy.hpp"

#include "dynbc/errors.hpp"
#include "dynbc/linalg.hpp"

#include <cmath>

namespace dynbc {

double energy(const Field& u, const Operators& ops, const ModelSpec& model) {
  require_same_mesh(u, ops, "energy");
  const Vector& v = u.values;
  double e = 0.5 * v.dot(ops.stiffness * v);
  if (model.mu == 1) e += 0.5 * v.dot(ops.m_bnd.cwiseProduct(v));
  e += model.f.F_sum(v, ops.m_int);
  return e;
}

Vector energy_gradient(const Field& u, const Operators& ops, const ModelSpec& model) {
  require_same_mesh(u, ops, "energy_gradient");
  const Vector& v = u.values;
  Vector g = ops.stiffness * v;
  if (model.mu == 1) g += ops.m_bnd.cwiseProduct(v);
  g += ops.m_int.cwiseProduct(model.f.f(v));
  return g;
}

double h1_norm(const Field& u, const Operators& ops) {
  require_same_mesh(u, ops, "h1_norm");
  return std::sqrt(u.values.dot(ops.h1_matrix * u.values));
}

double h1_dist(const Field& a, const Field& b, const Operators& ops) {
  require_same_mesh(a, ops, "h1_dist");
  require_same_mesh(b, ops, "h1_dist");
  const Vector d = a.values - b.values;
  return std::sqrt(d.dot(ops.h1_matrix * d));
}

double dual_norm(const Vector& r, const Operators& ops) {
  if (r.size() != ops.node_count)
    throw ConfigError("dual_norm: functional size does not match operator size");
  if (r.norm() == 0.0) return 0.0;
  const Vector w =
      cg_solve_or_throw(ops.h1_matrix, r, 1e-12, 20 * ops.node_count + 200, "dual_norm");
  const double sq = r.dot(w);
  return std::sqrt(std::max(sq, 0.0));
}

L2Norms l2_norms(const Field& u, const Operators& ops) {
  require_same_mesh(u, ops, "l2_norms");
  L2Norms out;
  out.interior = std::sqrt(u.values.dot(ops.m_int.cwiseProduct(u.values)));
  out.boundary = std::sqrt(u.values.dot(ops.m_bnd.cwiseProduct(u.values)));
  return out;
}

LpNorms lp_norms(const Field& u, const Operators& ops, double p) {
  require_same_mesh(u, ops, "lp_norms");
  if (!(p >= 1.0)) throw ConfigError("lp_norms: p must be >= 1");
  double si = 0.0, sb = 0.0;
  for (Eigen::Index i = 0; i < u.values.size(); ++i) {
    const double a = std::pow(std::abs(u.values(i)), p);
    si += ops.m_int(i) * a;
    sb += ops.m_bnd(i) * a;
  }
  LpNorms out;
  out.interior = std::pow(si, 1.0 / p);
  out.boundary = std::pow(sb, 1.0 / p);
  return out;
}

}  // namespace dynbc
