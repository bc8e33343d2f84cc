#include "dynbc/flow.hpp"

#include "dynbc/errors.hpp"
#include "dynbc/linalg.hpp"
#include "dynbc/log.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dynbc {

namespace {

constexpr double kBlowupSup = 1e8;
constexpr double kEnergySlack = 1e-12;
constexpr double kStepCgTol = 1e-13;  // well inside the solver contract; keeps equilibria fixed

SpMat plus_diag(const SpMat& A, double a_scale, const Vector& d) {
  SpMat D(d.size(), d.size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(d.size()));
  for (Eigen::Index i = 0; i < d.size(); ++i) trip.emplace_back(i, i, d(i));
  D.setFromTriplets(trip.begin(), trip.end());
  SpMat out = a_scale * A;
  out += D;
  out.makeCompressed();
  return out;
}

void validate(const FlowConfig& c) {
  if (!(c.dt0 > 0.0) || !(c.dt_min > 0.0) || !(c.dt_max > 0.0))
    throw ConfigError("flow: dt0, dt_min, dt_max must be positive");
  if (c.dt_min > c.dt_max) throw ConfigError("flow: dt_min must not exceed dt_max");
  if (!(c.t_end > 0.0)) throw ConfigError("flow: t_end must be positive");
  if (!(c.tol_stat > 0.0)) throw ConfigError("flow: tol_stat must be positive");
  if (c.record_every < 1) throw ConfigError("flow: record_every must be >= 1");
  if (!(c.newton_tol > 0.0) || c.newton_max_iter < 1)
    throw ConfigError("flow: Newton parameters must be positive");
}

double lp_exponent_for(int dim) { return dim >= 3 ? 4.0 * dim / (dim - 2) : 6.0; }

ImplicitStepResult newton_step(const Field& u, double dt, const Operators& ops,
                               const ModelSpec& model, double newton_tol, int newton_max_iter) {
  ImplicitStepResult res;
  res.u = u;
  const double tol = newton_tol * (1.0 + ops.m_dyn.cwiseProduct(u.values).norm());

  auto residual = [&](const Vector& w) -> Vector {
    Field wf{w, u.mesh_id};
    return ops.m_dyn.cwiseProduct(w - u.values) / dt + energy_gradient(wf, ops, model);
  };

  Vector w = u.values;
  Vector R = residual(w);
  double rnorm = R.norm();
  for (int it = 0; it < newton_max_iter; ++it) {
    if (rnorm <= tol) {
      res.u.values = w;
      res.ok = true;
      res.newton_iters = it;
      return res;
    }
    Vector jac_diag = ops.m_dyn / dt + ops.m_int.cwiseProduct(model.f.fprime(w));
    if (model.mu == 1) jac_diag += ops.m_bnd;
    const SpMat J = plus_diag(ops.stiffness, 1.0, jac_diag);
    Eigen::SparseLU<SpMat> lu(J);
    if (lu.info() != Eigen::Success) {
      res.newton_iters = it;
      return res;  // singular Jacobian: let the caller shrink dt
    }
    const Vector delta = lu.solve(-R);
    if (!delta.allFinite()) {
      res.newton_iters = it;
      return res;
    }
    double alpha = 1.0;
    Vector w_try, R_try;
    double rnorm_try = std::numeric_limits<double>::infinity();
    while (alpha > 1e-6) {
      w_try = w + alpha * delta;
      R_try = residual(w_try);
      rnorm_try = R_try.allFinite() ? R_try.norm() : std::numeric_limits<double>::infinity();
      if (rnorm_try < rnorm) break;
      alpha *= 0.5;
    }
    if (!(rnorm_try < rnorm)) {
      res.newton_iters = it;
      return res;  // line search stalled
    }
    w = std::move(w_try);
    R = std::move(R_try);
    rnorm = rnorm_try;
  }
  res.newton_iters = newton_max_iter;
  if (rnorm <= tol) {
    res.u.values = w;
    res.ok = true;
  }
  return res;
}

}  // namespace

std::string to_string(FlowStatus s) {
  switch (s) {
    case FlowStatus::converged: return "converged";
    case FlowStatus::horizon_reached: return "horizon_reached";
    case FlowStatus::dt_underflow: return "dt_underflow";
    case FlowStatus::blow_up: return "blow_up";
  }
  return "unknown";
}

std::string to_string(Scheme s) {
  return s == Scheme::semi_implicit ? "semi_implicit" : "implicit";
}

Field step_semi_implicit(const Field& u, double dt, const Operators& ops, const ModelSpec& model) {
  require_same_mesh(u, ops, "step_semi_implicit");
  if (!(dt > 0.0)) throw ConfigError("step_semi_implicit: dt must be positive");
  Vector diag = ops.m_dyn;
  if (model.mu == 1) diag += dt * ops.m_bnd;
  const SpMat A = plus_diag(ops.stiffness, dt, diag);
  const Vector rhs =
      ops.m_dyn.cwiseProduct(u.values) - dt * ops.m_int.cwiseProduct(model.f.f(u.values));
  Field out;
  out.values = cg_solve_or_throw(A, rhs, kStepCgTol, 20 * ops.node_count + 200,
                                 "step_semi_implicit", &u.values);
  out.mesh_id = u.mesh_id;
  if (!out.values.allFinite()) throw NumericalError("step_semi_implicit: non-finite state");
  return out;
}

ImplicitStepResult step_implicit(const Field& u, double dt, const Operators& ops,
                                 const ModelSpec& model) {
  require_same_mesh(u, ops, "step_implicit");
  if (!(dt > 0.0)) throw ConfigError("step_implicit: dt must be positive");
  const FlowConfig defaults;
  return newton_step(u, dt, ops, model, defaults.newton_tol, defaults.newton_max_iter);
}

TrajectoryRecord run_trajectory(const Field& u0, const FlowConfig& cfg, const Operators& ops,
                                const ModelSpec& model, const Field* reference) {
  require_same_mesh(u0, ops, "run_trajectory");
  if (reference) require_same_mesh(*reference, ops, "run_trajectory reference");
  validate(cfg);

  TrajectoryRecord rec;
  rec.config = cfg;
  rec.mesh_id = ops.mesh_id;
  rec.lp_exponent = lp_exponent_for(model.mesh_dim);

  Field u = u0;
  double E = energy(u, ops, model);
  double t = 0.0;

  auto push_record = [&](double ut_l2, double ut_bnd) {
    rec.times.push_back(t);
    rec.energies.push_back(E);
    rec.ut_l2.push_back(ut_l2);
    rec.ut_bnd_l2.push_back(ut_bnd);
    rec.grad_dual.push_back(dual_norm(energy_gradient(u, ops, model), ops));
    rec.h1_dist_ref.push_back(reference ? h1_dist(u, *reference, ops)
                                        : std::numeric_limits<double>::quiet_NaN());
    const LpNorms lp = lp_norms(u, ops, rec.lp_exponent);
    rec.lp_interior.push_back(lp.interior);
    rec.lp_boundary.push_back(lp.boundary);
    rec.snapshots.push_back(u.values);
  };

  push_record(0.0, 0.0);

  // The semi-implicit step matrix depends only on dt; rebuild it lazily.
  double cached_dt = -1.0;
  SpMat A_cached;
  auto semi_step = [&](double dt_step) {
    if (dt_step != cached_dt) {
      Vector diag = ops.m_dyn;
      if (model.mu == 1) diag += dt_step * ops.m_bnd;
      A_cached = plus_diag(ops.stiffness, dt_step, diag);
      cached_dt = dt_step;
    }
    const Vector rhs =
        ops.m_dyn.cwiseProduct(u.values) - dt_step * ops.m_int.cwiseProduct(model.f.f(u.values));
    Field out;
    out.values = cg_solve_or_throw(A_cached, rhs, kStepCgTol, 20 * ops.node_count + 200,
                                   "run_trajectory step", &u.values);
    out.mesh_id = u.mesh_id;
    return out;
  };

  double dt = std::clamp(cfg.dt0, cfg.dt_min, cfg.dt_max);
  int streak = 0;
  rec.status = FlowStatus::horizon_reached;
  const double t_eps = 1e-12 * std::max(1.0, cfg.t_end);
  bool last_recorded = true;
  double last_ut_l2 = 0.0;
  double last_ut_bnd = 0.0;

  while (t < cfg.t_end - t_eps) {
    const double dt_step = std::min(dt, cfg.t_end - t);

    Field u_new;
    if (cfg.scheme == Scheme::semi_implicit) {
      u_new = semi_step(dt_step);
    } else {
      ImplicitStepResult r =
          newton_step(u, dt_step, ops, model, cfg.newton_tol, cfg.newton_max_iter);
      if (!r.ok) {
        ++rec.steps_rejected;
        dt *= 0.5;
        streak = 0;
        if (dt < cfg.dt_min) {
          rec.status = FlowStatus::dt_underflow;
          break;
        }
        continue;
      }
      u_new = std::move(r.u);
    }
    if (!u_new.values.allFinite()) throw NumericalError("run_trajectory: non-finite state");

    const double E_new = energy(u_new, ops, model);
    if (cfg.energy_backtrack && E_new > E + kEnergySlack * (1.0 + std::abs(E))) {
      ++rec.steps_rejected;
      dt *= 0.5;
      streak = 0;
      if (dt < cfg.dt_min) {
        rec.status = FlowStatus::dt_underflow;
        break;
      }
      continue;
    }

    const Vector ut = (u_new.values - u.values) / dt_step;
    u = std::move(u_new);
    E = E_new;
    t += dt_step;
    ++rec.steps_accepted;
    ++streak;
    if (streak >= 5) {
      dt = std::min(dt * 1.2, cfg.dt_max);
      streak = 0;
    }

    last_ut_l2 = std::sqrt(ut.dot(ops.m_int.cwiseProduct(ut)));
    last_ut_bnd = std::sqrt(ut.dot(ops.m_bnd.cwiseProduct(ut)));
    const double ut_mdyn = std::sqrt(ut.dot(ops.m_dyn.cwiseProduct(ut)));

    last_recorded = (rec.steps_accepted % cfg.record_every == 0);
    if (last_recorded) push_record(last_ut_l2, last_ut_bnd);

    if (ut_mdyn < cfg.tol_stat) {
      rec.status = FlowStatus::converged;
      break;
    }
    if (u.values.cwiseAbs().maxCoeff() > kBlowupSup) {
      rec.status = FlowStatus::blow_up;
      break;
    }
  }

  if (!last_recorded) push_record(last_ut_l2, last_ut_bnd);
  rec.final_dt = dt;
  log_debug("run_trajectory: status " + to_string(rec.status) + ", " +
            std::to_string(rec.steps_accepted) + " accepted / " +
            std::to_string(rec.steps_rejected) + " rejected, " +
            std::to_string(rec.times.size()) + " records");
  return rec;
}

DissipationReport dissipation_check(const TrajectoryRecord& rec) {
  DissipationReport rep;
  const size_t n = rec.times.size();
  if (n < 3) throw ConfigError("dissipation_check: need at least 3 records");
  rep.n_intervals = static_cast<int>(n) - 1;
  for (size_t k = 0; k + 1 < n; ++k) {
    const double dt = rec.times[k + 1] - rec.times[k];
    if (!(dt > 0.0)) throw NumericalError("dissipation_check: non-increasing record times");
    const double scale = 1.0 + std::abs(rec.energies[k]);
    const double dE = (rec.energies[k + 1] - rec.energies[k]) / dt;
    const double diss =
        rec.ut_l2[k + 1] * rec.ut_l2[k + 1] + rec.ut_bnd_l2[k + 1] * rec.ut_bnd_l2[k + 1];
    rep.max_identity_residual = std::max(rep.max_identity_residual, std::abs(dE + diss) / scale);
    rep.max_energy_increase =
        std::max(rep.max_energy_increase, (rec.energies[k + 1] - rec.energies[k]) / scale);
  }
  rep.max_energy_increase = std::max(rep.max_energy_increase, 0.0);
  return rep;
}

LpBoundReport lp_bound_monitor(const TrajectoryRecord& rec) {
  LpBoundReport rep;
  const size_t n = rec.times.size();
  if (n == 0) throw ConfigError("lp_bound_monitor: empty record");
  const double p = rec.lp_exponent;
  auto B = [&](size_t k) {
    return std::pow(rec.lp_interior[k], p) + std::pow(rec.lp_boundary[k], p);
  };
  const size_t tail_count = std::max<size_t>(1, n / 4);
  const size_t tail_start = n > tail_count ? n - tail_count : 0;
  rep.initial = B(0);
  rep.final_value = B(n - 1);
  for (size_t k = 0; k < n; ++k) {
    const double b = B(k);
    rep.sup_value = std::max(rep.sup_value, b);
    if (k < tail_start)
      rep.early_max = std::max(rep.early_max, b);
    else
      rep.tail_max = std::max(rep.tail_max, b);
  }
  if (tail_start == 0) rep.early_max = rep.initial;
  // Absorbing-set shape: the functional may decay or climb to its plateau but
  // must never overshoot the larger of its initial and final levels.
  rep.bounded = rec.status != FlowStatus::blow_up &&
                rep.sup_value <= std::max(rep.initial, rep.final_value) * (1.0 + 1e-6);
  return rep;
}

}  // namespace dynbc
