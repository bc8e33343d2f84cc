#pragma once

#include "dynbc/energy.hpp"

#include <string>
#include <vector>

namespace dynbc {

enum class Scheme { semi_implicit, implicit };
enum class FlowStatus { converged, horizon_reached, dt_underflow, blow_up };

std::string to_string(FlowStatus s);
std::string to_string(Scheme s);

struct FlowConfig {
  double dt0 = 1e-3;
  double dt_min = 1e-9;
  double dt_max = 5e-2;
  double t_end = 100.0;
  double tol_stat = 1e-9;        // stop when ||u_t||_{M_dyn} drops below
  Scheme scheme = Scheme::semi_implicit;
  double newton_tol = 1e-10;
  int newton_max_iter = 30;
  int record_every = 1;
  bool energy_backtrack = true;  // reject steps that raise E beyond slack
};

// One step of (M_dyn + dt(K + mu M_bnd)) u+ = M_dyn u - dt M_int f(u),
// CG with warm start from u (preserves equilibria and linear invariants to
// solver precision).
Field step_semi_implicit(const Field& u, double dt, const Operators& ops,
                         const ModelSpec& model);

struct ImplicitStepResult {
  Field u;
  bool ok = false;        // false = Newton diverged, caller should shrink dt
  int newton_iters = 0;
};

// Backward Euler M_dyn (u+ - u)/dt + grad E(u+) = 0 by damped Newton with
// residual-halving line search.
ImplicitStepResult step_implicit(const Field& u, double dt, const Operators& ops,
                                 const ModelSpec& model);

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<double> energies;
  std::vector<double> ut_l2;       // ||u_t||_{L2 interior}, 0 at the initial record
  std::vector<double> ut_bnd_l2;   // ||u_t||_{L2 boundary}
  std::vector<double> grad_dual;   // dual norm of the energy gradient
  std::vector<double> h1_dist_ref; // NaN when no reference was supplied
  std::vector<double> lp_interior;
  std::vector<double> lp_boundary;
  std::vector<Vector> snapshots;   // one state per record
  FlowStatus status = FlowStatus::horizon_reached;
  long steps_accepted = 0;
  long steps_rejected = 0;
  double final_dt = 0.0;
  double lp_exponent = 6.0;
  FlowConfig config;
  std::uint64_t mesh_id = 0;
};

// Adaptive-dt gradient flow: energy backtracking halves dt on an energy
// increase, 5 consecutive accepted steps grow dt by 1.2 up to dt_max.
// Stops on stationarity, horizon, dt underflow, or sup-norm blow-up (1e8).
TrajectoryRecord run_trajectory(const Field& u0, const FlowConfig& cfg,
                                const Operators& ops, const ModelSpec& model,
                                const Field* reference = nullptr);

struct DissipationReport {
  double max_identity_residual = 0.0;  // max |dE/dt + ||u_t||^2| / (1+|E|)
  double max_energy_increase = 0.0;    // max positive jump / (1+|E|)
  int n_intervals = 0;
};

// Checks the discrete energy identity dE/dt = -||u_t||^2 - ||u_t||_bnd^2 over
// recorded intervals. Meaningful when record_every == 1 (one step per
// interval); the residual is O(dt) for smooth runs.
DissipationReport dissipation_check(const TrajectoryRecord& rec);

struct LpBoundReport {
  double sup_value = 0.0;
  double initial = 0.0;
  double final_value = 0.0;
  double early_max = 0.0;   // max over the first three quartiles of records
  double tail_max = 0.0;    // max over the last quartile
  bool bounded = false;     // no blow-up and no overshoot past max(initial, plateau)
};

// Monitors B(t) = ||u||_{p,interior}^p + ||u||_{p,boundary}^p along a run.
LpBoundReport lp_bound_monitor(const TrajectoryRecord& rec);

}  // namespace dynbc
