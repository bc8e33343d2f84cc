#include "dynbc/lojasiewicz.hpp"

#include "dynbc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace dynbc {

namespace {

void require_mesh(std::uint64_t a, std::uint64_t b, const char* where) {
  if (a != b) throw ConfigError(std::string(where) + ": records from a different mesh");
}

double interior_residual_dual(const Vector& state, const Operators& ops, const ModelSpec& model) {
  Vector r = ops.stiffness * state + ops.m_int.cwiseProduct(model.f.f(state));
  for (int b : ops.boundary_idx) r(b) = 0.0;
  return dual_norm(r, ops);
}

// M_dyn-weighted speed at a record: interior and boundary L2 parts combined.
double record_speed(const TrajectoryRecord& rec, size_t i) {
  return std::sqrt(rec.ut_l2[i] * rec.ut_l2[i] + rec.ut_bnd_l2[i] * rec.ut_bnd_l2[i]);
}

// Trapezoid of the record speeds over [a, b], linearly interpolating inside
// straddled intervals. Assumes a <= b within the recorded span.
double speed_integral(const TrajectoryRecord& rec, double a, double b) {
  double total = 0.0;
  for (size_t k = 0; k + 1 < rec.times.size(); ++k) {
    const double t0 = rec.times[k];
    const double t1 = rec.times[k + 1];
    const double lo = std::max(t0, a);
    const double hi = std::min(t1, b);
    if (hi <= lo) continue;
    const double v0 = record_speed(rec, k);
    const double v1 = record_speed(rec, k + 1);
    const double w = t1 - t0;
    const double vlo = w > 0.0 ? v0 + (v1 - v0) * (lo - t0) / w : v0;
    const double vhi = w > 0.0 ? v0 + (v1 - v0) * (hi - t0) / w : v1;
    total += 0.5 * (hi - lo) * (vlo + vhi);
  }
  return total;
}

}  // namespace

double ls_lhs(const Field& u, const Vector* u_t, const Operators& ops, const ModelSpec& model) {
  require_same_mesh(u, ops, "ls_lhs");
  const double dual_part = interior_residual_dual(u.values, ops, model);
  double bnd_part;
  if (u_t) {
    if (u_t->size() != u.values.size()) throw ConfigError("ls_lhs: u_t size mismatch");
    const Field ut_field{*u_t, u.mesh_id};
    bnd_part = boundary_l2(trace(ut_field, ops), ops);
  } else {
    bnd_part = boundary_l2(boundary_flux_defect(u, ops, model), ops);
  }
  return dual_part + bnd_part;
}

LojasiewiczFit estimate_theta(const TrajectoryRecord& rec, const EquilibriumRecord& eq,
                              const Operators& ops, const ModelSpec& model) {
  require_mesh(rec.mesh_id, ops.mesh_id, "estimate_theta");
  require_mesh(eq.psi.mesh_id, ops.mesh_id, "estimate_theta");
  if (rec.snapshots.size() != rec.times.size())
    throw ConfigError("estimate_theta: record is missing snapshots");

  LojasiewiczFit fit;
  const double dist_cap = 0.1 * h1_norm(eq.psi, ops) + 0.01;

  std::vector<double> lg, ll, gaps, lhss;
  for (size_t i = 0; i < rec.times.size(); ++i) {
    const double gap = rec.energies[i] - eq.energy;
    if (gap < fit.window_lo || gap > fit.window_hi) continue;
    Field ui{rec.snapshots[i], rec.mesh_id};
    if (h1_dist(ui, eq.psi, ops) >= dist_cap) continue;
    const double lhs = interior_residual_dual(ui.values, ops, model) + rec.ut_bnd_l2[i];
    if (!(lhs > 0.0)) continue;
    gaps.push_back(gap);
    lhss.push_back(lhs);
    lg.push_back(std::log(gap));
    ll.push_back(std::log(lhs));
  }
  fit.n_points = static_cast<int>(lg.size());
  if (fit.n_points < 2) return fit;

  const double n = static_cast<double>(lg.size());
  double sx = 0.0, sy = 0.0;
  for (size_t i = 0; i < lg.size(); ++i) {
    sx += lg[i];
    sy += ll[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < lg.size(); ++i) {
    const double dx = lg[i] - mx;
    const double dy = ll[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx < 1e-30) return fit;  // degenerate window, keep the unreliable default

  const double slope = sxy / sxx;
  double ss_res = 0.0;
  for (size_t i = 0; i < lg.size(); ++i) {
    const double pred = my + slope * (lg[i] - mx);
    ss_res += (ll[i] - pred) * (ll[i] - pred);
  }
  fit.one_minus_theta = slope;
  fit.theta = 1.0 - slope;
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 0.0;

  double c = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < gaps.size(); ++i)
    c = std::min(c, lhss[i] / std::pow(gaps[i], slope));
  fit.constant_c = c;
  fit.violated = false;
  for (size_t i = 0; i < gaps.size(); ++i)
    if (lhss[i] < c * std::pow(gaps[i], slope) * (1.0 - 1e-6)) fit.violated = true;

  fit.unreliable = fit.n_points < 8 || fit.r_squared < 0.9 || !(slope > 0.0) || !(slope < 1.0);
  return fit;
}

FiniteLengthReport finite_length_check(const TrajectoryRecord& rec, const EquilibriumRecord& eq,
                                       const LojasiewiczFit& fit) {
  FiniteLengthReport rep;
  if (rec.times.size() < 2) throw ConfigError("finite_length_check: need at least 2 records");
  const double t_final = rec.times.back();

  rep.total_integral = speed_integral(rec, rec.times.front(), t_final);
  rep.tail_integral = speed_integral(rec, 0.9 * t_final, t_final);
  rep.tail_fraction = rep.total_integral > 0.0 ? rep.tail_integral / rep.total_integral : 0.0;
  rep.tail_ok = rep.tail_integral <= 0.01 * rep.total_integral;

  for (size_t i = 0; i < rec.times.size(); ++i) {
    const double gap = rec.energies[i] - eq.energy;
    if (gap >= fit.window_lo && gap <= fit.window_hi) {
      rep.window_entered = true;
      rep.window_entry_t = rec.times[i];
      rep.gap_at_entry = gap;
      break;
    }
  }
  if (rep.window_entered && fit.theta > 0.0) {
    rep.bound_value = (2.0 / fit.theta) * std::pow(rep.gap_at_entry, fit.theta);
    rep.integral_from_entry = speed_integral(rec, rep.window_entry_t, t_final);
    rep.slack = rep.bound_value - rep.integral_from_entry;
    rep.bound_ok = rep.slack >= 0.0;
  }
  return rep;
}

ConvergenceCertificate convergence_certificate(const TrajectoryRecord& rec,
                                               const EquilibriumRecord& eq, const Operators& ops,
                                               const LojasiewiczFit* fit) {
  require_mesh(rec.mesh_id, ops.mesh_id, "convergence_certificate");
  require_mesh(eq.psi.mesh_id, ops.mesh_id, "convergence_certificate");
  if (rec.times.empty()) throw ConfigError("convergence_certificate: empty record");

  ConvergenceCertificate cert;
  const size_t n = rec.times.size();
  Field last{rec.snapshots.back(), rec.mesh_id};
  cert.final_h1_dist = h1_dist(last, eq.psi, ops);
  cert.final_ut = record_speed(rec, n - 1);
  if (fit) {
    cert.theta = fit->theta;
    cert.fit_reliable = !fit->unreliable;
  }

  const size_t tail_count = std::max<size_t>(1, n / 4);
  cert.tail_monotone = true;
  double prev = std::numeric_limits<double>::infinity();
  for (size_t i = n - tail_count; i < n; ++i) {
    Field ui{rec.snapshots[i], rec.mesh_id};
    const double d = h1_dist(ui, eq.psi, ops);
    if (d > prev + 1e-12 * (1.0 + prev)) cert.tail_monotone = false;
    prev = d;
  }

  if (rec.status == FlowStatus::converged) {
    cert.accepted = true;
  } else {
    cert.accepted = false;
    cert.reason = "status=" + to_string(rec.status);
  }
  return cert;
}

}  // namespace dynbc
