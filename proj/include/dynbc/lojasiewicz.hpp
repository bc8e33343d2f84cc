#pragma once

#include "dynbc/equilibrium.hpp"
#include "dynbc/flow.hpp"

#include <string>

namespace dynbc {

// Left-hand side of the gradient inequality: dual norm of the interior
// residual rows of K u + M_int f(u), plus the boundary L2 norm of the flux
// defect. Along trajectories the defect is -trace(u_t); pass u_t for that
// route, nullptr to use the variational boundary_flux_defect.
double ls_lhs(const Field& u, const Vector* u_t, const Operators& ops,
              const ModelSpec& model);

struct LojasiewiczFit {
  double theta = 0.0;            // 1 - slope of log(lhs) vs log(gap)
  double one_minus_theta = 0.0;
  double constant_c = 0.0;       // certified: min lhs_i / gap_i^(1-theta) in window
  double r_squared = 0.0;
  double window_lo = 1e-12;
  double window_hi = 1e-3;
  int n_points = 0;
  bool violated = false;         // any window point below c*gap^(1-theta)*(1-1e-6)
  bool unreliable = true;        // n_points < 8 or r2 < 0.9 or slope outside (0,1)
};

// Fits log(ls_lhs) = (1-theta) log(E(u)-E(psi)) + log c over recorded points
// with gap in [1e-12, 1e-3] and H1 distance to psi below 0.1 ||psi||_H1 + 0.01.
LojasiewiczFit estimate_theta(const TrajectoryRecord& rec, const EquilibriumRecord& eq,
                              const Operators& ops, const ModelSpec& model);

struct FiniteLengthReport {
  double total_integral = 0.0;   // trapezoid of ||u_t||_L2 over the whole run
  double tail_integral = 0.0;    // over the final tenth of the time span
  double tail_fraction = 0.0;
  bool tail_ok = false;          // tail <= 1% of total
  double window_entry_t = 0.0;   // first record inside the fit window
  double gap_at_entry = 0.0;
  double bound_value = 0.0;      // (2/theta) * gap^theta at window entry
  double integral_from_entry = 0.0;
  double slack = 0.0;            // bound - integral_from_entry
  bool bound_ok = false;
  bool window_entered = false;
};

FiniteLengthReport finite_length_check(const TrajectoryRecord& rec,
                                       const EquilibriumRecord& eq,
                                       const LojasiewiczFit& fit);

struct ConvergenceCertificate {
  bool accepted = false;
  std::string reason;            // set when declined
  double final_h1_dist = 0.0;    // to the polished equilibrium
  double final_ut = 0.0;         // M_dyn-weighted ||u_t|| at the last record
  double theta = 0.0;
  bool fit_reliable = false;
  bool tail_monotone = false;    // H1 distance non-increasing on the last quartile
};

// Certifies convergence of a run against its polished equilibrium. Declined
// (accepted = false, reason set) for non-converged statuses; the numeric
// fields are still filled where computable.
ConvergenceCertificate convergence_certificate(const TrajectoryRecord& rec,
                                               const EquilibriumRecord& eq,
                                               const Operators& ops,
                                               const LojasiewiczFit* fit);

}  // namespace dynbc
