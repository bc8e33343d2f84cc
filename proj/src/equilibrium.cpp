#include "dynbc/equilibrium.hpp"

#include "dynbc/errors.hpp"
#include "dynbc/linalg.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace dynbc {

namespace {

constexpr double kNondegenerateEig = 1e-8;
constexpr double kLiftCgTol = 1e-12;

SpMat plus_diag(const SpMat& A, const Vector& d) {
  SpMat D(d.size(), d.size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(d.size()));
  for (Eigen::Index i = 0; i < d.size(); ++i) trip.emplace_back(i, i, d(i));
  D.setFromTriplets(trip.begin(), trip.end());
  SpMat out = A;
  out += D;
  out.makeCompressed();
  return out;
}

SpMat hessian_at(const Vector& w, const Operators& ops, const ModelSpec& model) {
  Vector d = ops.m_int.cwiseProduct(model.f.fprime(w));
  if (model.mu == 1) d += ops.m_bnd;
  return plus_diag(ops.stiffness, d);
}

// v'Hv >= -max|f'| v'M_int v >= -max|f'| v'M_dyn v, so this shift keeps
// H - shift*M_dyn positive definite with margin.
double hessian_shift(const Vector& psi, const ModelSpec& model) {
  const double fpmax = model.f.fprime(psi).cwiseAbs().maxCoeff();
  return -fpmax - 0.5 * (1.0 + fpmax);
}

void finish_record(EquilibriumRecord& rec, const Operators& ops, const ModelSpec& model) {
  rec.energy = energy(rec.psi, ops, model);
  rec.grad_dual = dual_norm(energy_gradient(rec.psi, ops, model), ops);
  const SpMat H = hessian_at(rec.psi.values, ops, model);
  const PencilEig eig = smallest_pencil_eig(H, ops.m_dyn, hessian_shift(rec.psi.values, model),
                                            1e-10, 500);
  rec.hess_min_eig = eig.value;
  rec.nondegenerate = eig.value > kNondegenerateEig;
}

}  // namespace

EquilibriumRecord solve_stationary(const Field& guess, const Operators& ops,
                                   const ModelSpec& model, double tol) {
  require_same_mesh(guess, ops, "solve_stationary");
  if (!(tol > 0.0)) throw ConfigError("solve_stationary: tol must be positive");

  constexpr int max_iter = 50;
  Vector u = guess.values;
  Field uf{u, guess.mesh_id};
  Vector g = energy_gradient(uf, ops, model);
  double gnorm = g.norm();

  for (int it = 0; it < max_iter; ++it) {
    if (dual_norm(g, ops) <= tol) {
      EquilibriumRecord rec;
      rec.psi = uf;
      rec.iterations = it;
      finish_record(rec, ops, model);
      return rec;
    }
    const SpMat H = hessian_at(u, ops, model);
    Eigen::SparseLU<SpMat> lu(H);
    if (lu.info() != Eigen::Success)
      throw SolverError("solve_stationary: singular Hessian", dual_norm(g, ops), it);
    const Vector delta = lu.solve(-g);
    if (!delta.allFinite())
      throw SolverError("solve_stationary: non-finite Newton step", dual_norm(g, ops), it);

    double alpha = 1.0;
    Vector u_try, g_try;
    double gnorm_try = std::numeric_limits<double>::infinity();
    while (alpha >= 1e-12) {
      u_try = u + alpha * delta;
      Field tf{u_try, guess.mesh_id};
      g_try = energy_gradient(tf, ops, model);
      gnorm_try = g_try.allFinite() ? g_try.norm() : std::numeric_limits<double>::infinity();
      if (gnorm_try < gnorm) break;
      alpha *= 0.5;
    }
    if (!(gnorm_try < gnorm))
      throw SolverError("solve_stationary: line search stalled", dual_norm(g, ops), it);
    u = std::move(u_try);
    uf.values = u;
    g = std::move(g_try);
    gnorm = gnorm_try;
  }
  if (dual_norm(g, ops) <= tol) {
    EquilibriumRecord rec;
    rec.psi = uf;
    rec.iterations = max_iter;
    finish_record(rec, ops, model);
    return rec;
  }
  throw SolverError("solve_stationary: no convergence in " + std::to_string(max_iter) +
                        " iterations",
                    dual_norm(g, ops), max_iter);
}

EquilibriumRecord minimize_energy(const Field& guess, const Operators& ops,
                                  const ModelSpec& model, double tol) {
  require_same_mesh(guess, ops, "minimize_energy");
  if (!(tol > 0.0)) throw ConfigError("minimize_energy: tol must be positive");

  constexpr int max_iter = 2000;
  constexpr double c1 = 1e-4;
  Field u = guess;
  double E = energy(u, ops, model);
  double alpha_prev = 1.0;
  int stagnant = 0;
  int it = 0;

  for (; it < max_iter; ++it) {
    const Vector g = energy_gradient(u, ops, model);
    const Vector d = -g.cwiseQuotient(ops.m_dyn);
    const double slope = g.dot(d);  // = -||g||^2 in the M_dyn^-1 metric
    if (std::sqrt(std::max(-slope, 0.0)) <= 1e-8 || stagnant >= 3) break;

    double alpha = 2.0 * alpha_prev;
    double E_try = std::numeric_limits<double>::infinity();
    Field u_try;
    while (alpha >= 1e-16) {
      u_try.values = u.values + alpha * d;
      u_try.mesh_id = u.mesh_id;
      E_try = u_try.values.allFinite() ? energy(u_try, ops, model)
                                       : std::numeric_limits<double>::infinity();
      if (E_try <= E + c1 * alpha * slope) break;
      alpha *= 0.5;
    }
    if (alpha < 1e-16)
      throw SolverError("minimize_energy: Armijo search failed", std::sqrt(-slope), it);
    stagnant = std::abs(E - E_try) <= 1e-14 * (1.0 + std::abs(E)) ? stagnant + 1 : 0;
    u = std::move(u_try);
    E = E_try;
    alpha_prev = alpha;
    if (u.values.cwiseAbs().maxCoeff() > 1e8)
      throw SolverError("minimize_energy: iterates diverge", std::sqrt(-slope), it);
  }

  EquilibriumRecord rec = solve_stationary(u, ops, model, tol);
  rec.iterations += it;
  return rec;
}

bool check_critical_point(const Field& u, const Operators& ops, const ModelSpec& model,
                          double tol) {
  require_same_mesh(u, ops, "check_critical_point");
  return dual_norm(energy_gradient(u, ops, model), ops) <= tol;
}

Field robin_lift(const Field& u, const Operators& ops) {
  require_same_mesh(u, ops, "robin_lift");
  Vector rhs = ops.stiffness * u.values;
  for (int b : ops.boundary_idx) rhs(b) = 0.0;
  Field out;
  out.values = cg_solve_or_throw(ops.h1_matrix, rhs, kLiftCgTol, 20 * ops.node_count + 200,
                                 "robin_lift", &u.values);
  out.mesh_id = u.mesh_id;
  return out;
}

Field neumann_lift(const Field& u, const Operators& ops) {
  require_same_mesh(u, ops, "neumann_lift");
  Vector interior_mass = ops.m_int;
  for (int b : ops.boundary_idx) interior_mass(b) = 0.0;
  const SpMat A = plus_diag(ops.stiffness, interior_mass);
  Vector rhs = ops.stiffness * u.values + interior_mass.cwiseProduct(u.values);
  for (int b : ops.boundary_idx) rhs(b) = 0.0;
  Field out;
  out.values = cg_solve_or_throw(A, rhs, kLiftCgTol, 20 * ops.node_count + 200, "neumann_lift",
                                 &u.values);
  out.mesh_id = u.mesh_id;
  return out;
}

Vector boundary_flux_defect(const Field& u, const Operators& ops, const ModelSpec& model) {
  require_same_mesh(u, ops, "boundary_flux_defect");
  const Vector r = ops.stiffness * u.values + ops.m_int.cwiseProduct(model.f.f(u.values));
  Vector defect(static_cast<Eigen::Index>(ops.boundary_idx.size()));
  for (size_t j = 0; j < ops.boundary_idx.size(); ++j) {
    const int b = ops.boundary_idx[j];
    defect(static_cast<Eigen::Index>(j)) = r(b) / ops.m_bnd(b) + model.mu * u.values(b);
  }
  return defect;
}

std::vector<Field> multistart_guesses(const Mesh& mesh, const ModelSpec& model, int count,
                                      std::uint64_t seed) {
  if (count < 1) throw ConfigError("multistart_guesses: count must be positive");
  std::vector<Field> out;
  out.reserve(static_cast<size_t>(count));

  std::vector<double> levels{0.0};
  for (double r : model.f.real_roots()) levels.push_back(r);
  for (double base : std::vector<double>(levels)) {
    levels.push_back(base + 0.1);
    levels.push_back(base - 0.1);
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end(),
                           [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
               levels.end());
  for (double v : levels) {
    if (static_cast<int>(out.size()) >= count) break;
    out.push_back(make_constant_field(mesh, v));
  }

  SplitMix64 rng(seed);
  while (static_cast<int>(out.size()) < count) {
    const double offset = rng.uniform(-1.0, 1.0);
    out.push_back(make_fourier_field(mesh, 0.5, offset, rng));
  }
  return out;
}

}  // namespace dynbc
