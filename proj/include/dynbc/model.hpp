#pragma once

#include "dynbc/linalg.hpp"
#include "dynbc/operators.hpp"

#include <optional>
#include <vector>

namespace dynbc {

// Polynomial nonlinearity f(s) = sum_k coeffs[k] s^k with exact antiderivative
// F (F(0) = 0) and derivative, all Horner-evaluated. Trailing zero
// coefficients are trimmed so degree() reflects the leading term.
class Nonlinearity {
 public:
  Nonlinearity() = default;
  explicit Nonlinearity(std::vector<double> coeffs);

  double f(double s) const;
  double fprime(double s) const;
  double F(double s) const;

  Vector f(const Vector& u) const;
  Vector fprime(const Vector& u) const;
  double F_sum(const Vector& u, const Vector& weights) const;

  int degree() const { return coeffs_.empty() ? 0 : static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<double>& coeffs() const { return coeffs_; }
  double leading_coeff() const { return coeffs_.empty() ? 0.0 : coeffs_.back(); }

  // Real roots of f (companion-matrix eigenvalues, imaginary part <= 1e-9).
  std::vector<double> real_roots() const;

 private:
  std::vector<double> coeffs_;
};

struct ModelSpec {
  int mu = 0;  // boundary coupling: 0 or 1
  Nonlinearity f;
  int mesh_dim = 1;
  std::optional<double> lambda;  // cached Poincare-type constant, if computed
};

ModelSpec make_model(int mu, std::vector<double> f_coeffs, int mesh_dim);

struct LambdaResult {
  double lambda = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

// Smallest generalized eigenvalue of (K + M_bnd) v = lambda M_int v, by
// inverse power iteration with shift 0; eigenpair relative residual <= 1e-10.
LambdaResult compute_lambda(const Operators& ops);

struct F2Report {
  bool pass = false;
  double growth_p = 0.0;  // max(deg f - 1, 0)
  double alpha = 0.0;     // +inf for dim <= 2, else 4/(dim-2)
  int mesh_dim = 1;
};

// Subcritical growth check; dim is the spatial dimension of the problem the
// polynomial is used in (may exceed the mesh dims supported here).
F2Report check_F2(const Nonlinearity& f, int dim);

struct F3Report {
  bool pass = false;
  double liminf = 0.0;  // liminf_{|s|->inf} f(s)/s, +-inf allowed
  double threshold = 0.0;
  int mu = 0;
};

// Dissipativity check: liminf f(s)/s must exceed -lambda/4 (mu=1) or 0 (mu=0).
// A failing report is a warning for callers, not an error.
F3Report check_F3(const Nonlinearity& f, int mu, double lambda);

}  // namespace dynbc
