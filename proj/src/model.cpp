#include "dynbc/model.hpp"

#include "dynbc/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dynbc {

Nonlinearity::Nonlinearity(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  for (double c : coeffs_)
    if (!std::isfinite(c)) throw ConfigError("Nonlinearity: non-finite coefficient");
  while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
}

double Nonlinearity::f(double s) const {
  double acc = 0.0;
  for (size_t k = coeffs_.size(); k-- > 0;) acc = acc * s + coeffs_[k];
  return acc;
}

double Nonlinearity::fprime(double s) const {
  double acc = 0.0;
  for (size_t k = coeffs_.size(); k-- > 1;) acc = acc * s + static_cast<double>(k) * coeffs_[k];
  return acc;
}

double Nonlinearity::F(double s) const {
  // F' = f termwise: coefficient a_k integrates to a_k s^{k+1} / (k+1).
  double acc = 0.0;
  for (size_t k = coeffs_.size(); k-- > 0;) acc = acc * s + coeffs_[k] / static_cast<double>(k + 1);
  return acc * s;
}

Vector Nonlinearity::f(const Vector& u) const {
  Vector out(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) out(i) = f(u(i));
  return out;
}

Vector Nonlinearity::fprime(const Vector& u) const {
  Vector out(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) out(i) = fprime(u(i));
  return out;
}

double Nonlinearity::F_sum(const Vector& u, const Vector& weights) const {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) acc += weights(i) * F(u(i));
  return acc;
}

std::vector<double> Nonlinearity::real_roots() const {
  const int d = degree();
  if (d == 0) return {};  // constant (or zero) polynomial
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(d, d);
  for (int i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) companion(i, d - 1) = -coeffs_[static_cast<size_t>(i)] / coeffs_.back();
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, /*computeEigenvectors=*/false);
  std::vector<double> roots;
  for (int i = 0; i < d; ++i) {
    const auto ev = es.eigenvalues()(i);
    if (std::abs(ev.imag()) <= 1e-9 * std::max(1.0, std::abs(ev.real()))) roots.push_back(ev.real());
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

ModelSpec make_model(int mu, std::vector<double> f_coeffs, int mesh_dim) {
  if (mu != 0 && mu != 1) throw ConfigError("model: mu must be 0 or 1, got " + std::to_string(mu));
  if (mesh_dim < 1) throw ConfigError("model: mesh_dim must be positive");
  ModelSpec m;
  m.mu = mu;
  m.f = Nonlinearity(std::move(f_coeffs));
  m.mesh_dim = mesh_dim;
  return m;
}

LambdaResult compute_lambda(const Operators& ops) {
  // Pencil (K + M_bnd) v = lambda M_int v is symmetric-definite with shift 0.
  PencilEig eig = smallest_pencil_eig(ops.h1_matrix, ops.m_int, 0.0, 1e-10, 500);
  LambdaResult out;
  out.lambda = eig.value;
  out.iterations = eig.iterations;
  out.residual = eig.residual;
  return out;
}

F2Report check_F2(const Nonlinearity& f, int dim) {
  if (dim < 1) throw ConfigError("check_F2: dimension must be positive");
  F2Report rep;
  rep.mesh_dim = dim;
  rep.growth_p = std::max(f.degree() - 1, 0);
  rep.alpha = dim <= 2 ? std::numeric_limits<double>::infinity() : 4.0 / (dim - 2);
  rep.pass = rep.growth_p < rep.alpha;
  return rep;
}

F3Report check_F3(const Nonlinearity& f, int mu, double lambda) {
  if (mu != 0 && mu != 1) throw ConfigError("check_F3: mu must be 0 or 1");
  F3Report rep;
  rep.mu = mu;
  rep.threshold = mu == 1 ? -lambda / 4.0 : 0.0;

  const int d = f.degree();
  const double inf = std::numeric_limits<double>::infinity();
  if (d == 0) {
    rep.liminf = 0.0;  // f(s)/s -> 0 for constant f
  } else if (d == 1) {
    rep.liminf = f.coeffs()[1];
  } else if (d % 2 == 1) {
    rep.liminf = f.leading_coeff() > 0.0 ? inf : -inf;  // both tails share the sign
  } else {
    rep.liminf = -inf;  // even degree: one tail always runs to -inf
  }
  rep.pass = rep.liminf > rep.threshold;
  return rep;
}

}  // namespace dynbc
