// Acceptance gate for the toolkit: ten end-to-end checks covering energy
// dissipation, conservation, convergence to equilibrium, the stationary
// solvers, the eigenvalue pencil, the decay-exponent fit, trajectory length,
// gradient exactness, the boundary lifts, and run determinism. Each check
// prints one [PASS] line; the first failed requirement aborts with [FAIL]
// and a nonzero exit code.

#include "dynbc/lojasiewicz.hpp"
#include "dynbc/runner.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace dynbc;

namespace {

// Always-on requirement: never compiled out in Release.
#define REQUIRE(cond, msg)                                                      \
  do {                                                                          \
    if (!(cond)) {                                                              \
      std::cerr << "[FAIL] " << __FILE__ << ":" << __LINE__ << " " << msg      \
                << "\n";                                                        \
      std::exit(1);                                                            \
    }                                                                           \
  } while (0)

std::string str(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

const std::vector<double> kDoubleWell{0.0, -1.0, 0.0, 1.0};

Field fourier_init(const Mesh& mesh, std::uint64_t seed, double amplitude = 0.5,
                   double offset = 0.0) {
  SplitMix64 rng(seed);
  return make_fourier_field(mesh, amplitude, offset, rng);
}

// Shared output of check 3, reused by checks 6 and 7: ten converged
// double-well runs with their polished equilibria and exponent fits.
struct ConvergedRuns {
  Mesh mesh;
  Operators ops;
  ModelSpec model;
  std::vector<TrajectoryRecord> recs;
  std::vector<EquilibriumRecord> eqs;
  std::vector<LojasiewiczFit> fits;  // filled by check 6
};

// 1. Energy is non-increasing step by step, and the discrete dissipation
// identity residual is first order in dt (halving dt halves it).
void check_dissipation() {
  Timer timer;
  for (int mu : {0, 1}) {
    const Mesh mesh = build_interval_mesh(201, 1.0);
    const Operators ops = assemble_operators(mesh);
    const ModelSpec model = make_model(mu, kDoubleWell, 1);
    const Field u0 = fourier_init(mesh, 7);

    FlowConfig mono;
    mono.dt0 = 1e-3;
    mono.t_end = 60.0;
    const TrajectoryRecord rec = run_trajectory(u0, mono, ops, model);
    REQUIRE(rec.status == FlowStatus::converged || rec.status == FlowStatus::horizon_reached,
            "mu=" + std::to_string(mu) + " run ended " + to_string(rec.status));
    for (size_t i = 1; i < rec.energies.size(); ++i)
      REQUIRE(rec.energies[i] <= rec.energies[i - 1] +
                                     1e-12 * (1.0 + std::abs(rec.energies[i - 1])),
              "energy rose at record " + std::to_string(i) + " (mu=" + std::to_string(mu) + ")");

    // The identity residual is dominated by the local truncation error, so
    // compare fixed-dt runs after a short burn-in past the rough transient.
    FlowConfig warm;
    warm.t_end = 0.05;
    const TrajectoryRecord wrec = run_trajectory(u0, warm, ops, model);
    const Field burned{wrec.snapshots.back(), mesh.id};
    auto residual_at = [&](double dt) {
      FlowConfig c;
      c.dt0 = dt;
      c.dt_min = dt;
      c.dt_max = dt;
      c.t_end = 0.4;
      return dissipation_check(run_trajectory(burned, c, ops, model)).max_identity_residual;
    };
    const double r1 = residual_at(1e-3);
    const double r2 = residual_at(5e-4);
    const double ratio = r1 / r2;
    REQUIRE(ratio >= 1.7 && ratio <= 2.3,
            "mu=" + std::to_string(mu) + " residual halving ratio " + str(ratio));
    std::cout << "[PASS] 1 dissipation: mu=" << mu << " monotone over "
              << rec.energies.size() - 1 << " steps, residual ratio " << str(ratio) << "\n";
  }
  REQUIRE(timer.elapsed() < 30.0, "dissipation check took " + str(timer.elapsed()) + "s");
}

// 2. With f == 0 and mu == 0 the flow conserves the lumped total mass.
void check_conservation() {
  Timer timer;
  const Mesh mesh = build_interval_mesh(101, 1.0);
  const Operators ops = assemble_operators(mesh);
  const ModelSpec model = make_model(0, {}, 1);

  FlowConfig cfg;
  cfg.t_end = 20.0;
  const TrajectoryRecord rec = run_trajectory(fourier_init(mesh, 3), cfg, ops, model);
  const double q0 = ops.m_dyn.dot(rec.snapshots.front());
  double worst = 0.0;
  for (const Vector& s : rec.snapshots) worst = std::max(worst, std::abs(ops.m_dyn.dot(s) - q0));
  REQUIRE(worst <= 1e-10 * (1.0 + std::abs(q0)),
          "mass drift " + str(worst) + " over " + std::to_string(rec.snapshots.size()) +
              " records");
  REQUIRE(timer.elapsed() < 5.0, "conservation check took " + str(timer.elapsed()) + "s");
  std::cout << "[PASS] 2 conservation: drift " << str(worst) << " across "
            << rec.snapshots.size() << " records in " << str(timer.elapsed()) << "s\n";
}

// 3. Ten seeded double-well runs each converge to a single equilibrium: the
// final state matches its Newton polish in H1 and the distance-to-limit
// series is monotone over the last quartile of records.
ConvergedRuns check_convergence() {
  Timer timer;
  ConvergedRuns out{build_interval_mesh(101, 1.0), {}, {}, {}, {}, {}};
  out.ops = assemble_operators(out.mesh);
  out.model = make_model(0, kDoubleWell, 1);

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    FlowConfig cfg;
    cfg.t_end = 200.0;
    cfg.tol_stat = 1e-9;
    TrajectoryRecord rec = run_trajectory(fourier_init(out.mesh, seed), cfg, out.ops, out.model);
    REQUIRE(rec.status == FlowStatus::converged,
            "seed " + std::to_string(seed) + " ended " + to_string(rec.status));
    const double final_ut = std::hypot(rec.ut_l2.back(), rec.ut_bnd_l2.back());
    REQUIRE(final_ut < 1e-9, "seed " + std::to_string(seed) + " final speed " + str(final_ut));

    const Field fin{rec.snapshots.back(), rec.mesh_id};
    EquilibriumRecord eq = solve_stationary(fin, out.ops, out.model);
    const double dist = h1_dist(fin, eq.psi, out.ops);
    REQUIRE(dist <= 1e-6,
            "seed " + std::to_string(seed) + " H1 gap to polished equilibrium " + str(dist));

    std::vector<double> d;
    d.reserve(rec.snapshots.size());
    for (const Vector& s : rec.snapshots)
      d.push_back(h1_dist(Field{s, rec.mesh_id}, eq.psi, out.ops));
    for (size_t i = 3 * d.size() / 4; i + 1 < d.size(); ++i)
      REQUIRE(d[i + 1] <= d[i] + 1e-12 * (1.0 + d[i]),
              "seed " + std::to_string(seed) + " distance rose at record " + std::to_string(i));

    out.recs.push_back(std::move(rec));
    out.eqs.push_back(std::move(eq));
  }
  REQUIRE(timer.elapsed() < 120.0, "convergence runs took " + str(timer.elapsed()) + "s");
  std::cout << "[PASS] 3 convergence: 10/10 runs converged, H1 gap <= 1e-6, monotone tail ("
            << str(timer.elapsed()) << "s)\n";
  return out;
}

// 4. The descent and Newton solvers agree with each other, and the critical
// point test accepts exactly their outputs.
void check_stationary_solvers() {
  const Mesh mesh = build_interval_mesh(101, 1.0);
  const Operators ops = assemble_operators(mesh);
  const ModelSpec model = make_model(0, kDoubleWell, 1);

  const auto guesses = multistart_guesses(mesh, model, 20, 2025);
  REQUIRE(guesses.size() == 20, "expected 20 guesses, got " + std::to_string(guesses.size()));
  int rejected = 0;
  for (size_t k = 0; k < guesses.size(); ++k) {
    const EquilibriumRecord by_descent = minimize_energy(guesses[k], ops, model);
    const EquilibriumRecord by_newton = solve_stationary(by_descent.psi, ops, model);
    const double moved = h1_dist(by_descent.psi, by_newton.psi, ops);
    REQUIRE(moved <= 1e-8, "guess " + std::to_string(k) + " solvers disagree by " + str(moved));
    REQUIRE(check_critical_point(by_descent.psi, ops, model, 1e-10),
            "descent output " + std::to_string(k) + " rejected as critical point");
    REQUIRE(check_critical_point(by_newton.psi, ops, model, 1e-10),
            "newton output " + std::to_string(k) + " rejected as critical point");
    if (dual_norm(energy_gradient(guesses[k], ops, model), ops) > 1e-6) {
      ++rejected;
      REQUIRE(!check_critical_point(guesses[k], ops, model, 1e-10),
              "non-stationary guess " + std::to_string(k) + " accepted as critical point");
    }
  }
  std::cout << "[PASS] 4 stationary solvers: 20 starts agree to 1e-8, " << rejected
            << " non-stationary guesses rejected\n";
}

// 5. The pencil eigenvalue matches a dense oracle at three resolutions,
// respects the constant-field bound, and refines at second order.
void check_lambda() {
  std::vector<double> lam;
  for (int n : {101, 201, 401}) {
    const Mesh mesh = build_interval_mesh(n, 1.0);
    const Operators ops = assemble_operators(mesh);
    const LambdaResult lr = compute_lambda(ops);
    const double reference = oracle::pencil_smallest(ops.h1_matrix, ops.m_int);
    REQUIRE(std::abs(lr.lambda - reference) <= 1e-10 * std::abs(reference),
            "n=" + std::to_string(n) + " lambda " + str(lr.lambda) + " vs dense " +
                str(reference));
    REQUIRE(lr.lambda <= 2.0, "n=" + std::to_string(n) + " exceeds the constant-field bound");
    lam.push_back(lr.lambda);
  }
  const double richardson = (lam[0] - lam[1]) / (lam[1] - lam[2]);
  REQUIRE(richardson >= 3.5 && richardson <= 4.5, "refinement ratio " + str(richardson));
  std::cout << "[PASS] 5 eigenvalue: dense-oracle match at n=101/201/401, refinement ratio "
            << str(richardson) << "\n";
}

// 6. Decay-exponent fit: exactly 1/2 for the quadratic model, in [0.4, 0.6]
// with a clean violation scan at the double-well equilibria.
void check_exponent_fit(ConvergedRuns& data) {
  Timer timer;
  {
    const Mesh mesh = build_interval_mesh(101, 1.0);
    const Operators ops = assemble_operators(mesh);
    const ModelSpec model = make_model(1, {0.0, 1.0}, 1);
    FlowConfig cfg;
    cfg.t_end = 60.0;
    cfg.tol_stat = 1e-12;
    const TrajectoryRecord rec = run_trajectory(fourier_init(mesh, 23, 0.5, 0.3), cfg, ops, model);
    REQUIRE(rec.status == FlowStatus::converged, "quadratic run ended " + to_string(rec.status));
    const EquilibriumRecord eq =
        solve_stationary(Field{rec.snapshots.back(), rec.mesh_id}, ops, model, 1e-12);
    const LojasiewiczFit fit = estimate_theta(rec, eq, ops, model);
    REQUIRE(!fit.unreliable, "quadratic fit unreliable (n=" + std::to_string(fit.n_points) + ")");
    REQUIRE(std::abs(fit.one_minus_theta - 0.5) <= 0.02,
            "quadratic slope " + str(fit.one_minus_theta));
    REQUIRE(fit.r_squared >= 0.999, "quadratic fit r2 " + str(fit.r_squared));
    std::cout << "[PASS] 6a exponent fit (quadratic): slope " << str(fit.one_minus_theta)
              << ", r2 " << str(fit.r_squared) << "\n";
  }

  for (size_t k = 0; k < data.recs.size(); ++k) {
    REQUIRE(data.eqs[k].nondegenerate, "run " + std::to_string(k) + " limit is degenerate");
    LojasiewiczFit fit = estimate_theta(data.recs[k], data.eqs[k], data.ops, data.model);
    REQUIRE(!fit.unreliable, "run " + std::to_string(k) + " fit unreliable");
    REQUIRE(fit.one_minus_theta >= 0.4 && fit.one_minus_theta <= 0.6,
            "run " + std::to_string(k) + " slope " + str(fit.one_minus_theta));
    REQUIRE(!fit.violated, "run " + std::to_string(k) + " violation scan flagged a point");
    data.fits.push_back(fit);
  }
  REQUIRE(timer.elapsed() < 60.0, "exponent fits took " + str(timer.elapsed()) + "s");
  std::cout << "[PASS] 6b exponent fit (double well): 10 fits in [0.4, 0.6], scans clean\n";
}

// 7. Every converged run has an integrable speed: negligible tail mass and
// nonnegative slack against the (2/theta) gap^theta envelope.
void check_finite_length(const ConvergedRuns& data) {
  for (size_t k = 0; k < data.recs.size(); ++k) {
    const FiniteLengthReport fl = finite_length_check(data.recs[k], data.eqs[k], data.fits[k]);
    REQUIRE(fl.window_entered, "run " + std::to_string(k) + " never entered the fit window");
    REQUIRE(fl.tail_ok && fl.tail_fraction <= 0.01,
            "run " + std::to_string(k) + " tail fraction " + str(fl.tail_fraction));
    REQUIRE(fl.bound_ok && fl.slack >= 0.0,
            "run " + std::to_string(k) + " envelope slack " + str(fl.slack));
  }
  std::cout << "[PASS] 7 finite length: tails <= 1%, envelope slack >= 0 on all 10 runs\n";
}

// 8. The assembled gradient matches central differences of the energy on
// random states over both mesh dimensions and both boundary couplings.
void check_gradient_exactness() {
  const Mesh line = build_interval_mesh(51, 1.0);
  const Mesh rect = build_rect_mesh(7, 9, 1.0, 1.3);
  const Operators line_ops = assemble_operators(line);
  const Operators rect_ops = assemble_operators(rect);
  const std::vector<std::vector<double>> polys{
      kDoubleWell, {0.1, -1.0, 0.0, 1.0}, {0.0, 1.0}, {}};

  SplitMix64 rng(99);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const bool planar = k % 2 == 1;
    const Mesh& mesh = planar ? rect : line;
    const Operators& ops = planar ? rect_ops : line_ops;
    const ModelSpec model = make_model((k / 2) % 2, polys[k % 4], mesh.dim);

    Vector u(mesh.node_count), v(mesh.node_count);
    for (int i = 0; i < mesh.node_count; ++i) u(i) = rng.uniform(-1.0, 1.0);
    for (int i = 0; i < mesh.node_count; ++i) v(i) = rng.uniform(-1.0, 1.0);

    const double exact = energy_gradient(Field{u, mesh.id}, ops, model).dot(v);
    const double eps = 1e-5;
    const double ahead = energy(Field{u + eps * v, mesh.id}, ops, model);
    const double behind = energy(Field{u - eps * v, mesh.id}, ops, model);
    const double numeric = (ahead - behind) / (2.0 * eps);
    const double rel = std::abs(numeric - exact) / (1.0 + std::abs(exact));
    worst = std::max(worst, rel);
    REQUIRE(rel <= 1e-6, "triple " + std::to_string(k) + " gradient mismatch " + str(rel));
  }
  std::cout << "[PASS] 8 gradient exactness: 50 triples, worst relative error " << str(worst)
            << "\n";
}

// 9. Both lifts produce boundary-compatible fields, and the H1-versus-defect
// constant is stable under refinement.
void check_lifts() {
  for (const int mu : {1, 0}) {
    double c_min = 1e300, c_max = 0.0;
    for (int n : {51, 101, 201}) {
      const Mesh mesh = build_interval_mesh(n, 1.0);
      const Operators ops = assemble_operators(mesh);
      const ModelSpec model = make_model(mu, {}, 1);  // defect = weak flux + mu * trace

      double cross = 0.0, gram = 0.0;
      for (int k = 0; k < 6; ++k) {
        Vector vals(mesh.node_count);
        for (int i = 0; i < mesh.node_count; ++i) {
          const double x = mesh.node_coords(i, 0);
          switch (k) {
            case 0: vals(i) = std::sin(2.3 * x) + x * x; break;
            case 1: vals(i) = std::cos(M_PI * x); break;
            case 2: vals(i) = std::exp(x) - 1.0; break;
            case 3: vals(i) = x * x * x; break;
            case 4: vals(i) = 1.0 / (1.0 + x * x); break;
            default: vals(i) = std::cosh(x - 0.3); break;
          }
        }
        const Field u{vals, mesh.id};
        const Field w = mu == 1 ? robin_lift(u, ops) : neumann_lift(u, ops);
        const double lifted_defect =
            boundary_flux_defect(w, ops, model).cwiseAbs().maxCoeff();
        REQUIRE(lifted_defect <= 1e-10, "mu=" + std::to_string(mu) + " n=" + std::to_string(n) +
                                            " lifted defect " + str(lifted_defect));
        const double num = h1_dist(u, w, ops);
        const double den = boundary_l2(boundary_flux_defect(u, ops, model), ops);
        cross += num * den;
        gram += den * den;
      }
      const double fitted = cross / gram;  // least squares through the origin
      c_min = std::min(c_min, fitted);
      c_max = std::max(c_max, fitted);
    }
    REQUIRE(c_max / c_min <= 1.2, "mu=" + std::to_string(mu) + " lift constant varies " +
                                      str(c_max / c_min - 1.0));
    std::cout << "[PASS] 9 lifts: mu=" << mu << " defect <= 1e-10, constant varies "
              << str(100.0 * (c_max / c_min - 1.0)) << "% across n=51/101/201\n";
  }
}

// 10. Fixed seed implies byte-identical outputs, wall time aside.
void check_determinism() {
  namespace fs = std::filesystem;
  const Scenario sc = parse_scenario(
      "name = determinism\n"
      "mesh.n = 101\n"
      "mu = 0\n"
      "f.coeffs = 0, -1, 0, 1\n"
      "flow.t_end = 100\n"
      "init.kind = fourier_random\n"
      "init.seed = 7\n"
      "actions = check-model, lambda, run, equilibria, dissipation, lojasiewicz\n");

  const fs::path base = fs::temp_directory_path() / "dynbc_acceptance";
  fs::remove_all(base);
  const fs::path a = base / "a", b = base / "b";
  REQUIRE(run_scenario(sc, a.string()).exit_code == 0, "first determinism run failed");
  REQUIRE(run_scenario(sc, b.string()).exit_code == 0, "second determinism run failed");

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  auto without_wall_time = [](const std::string& text) {
    std::istringstream in(text);
    std::string line, kept;
    while (std::getline(in, line))
      if (line.find("wall_time_s") == std::string::npos) kept += line + "\n";
    return kept;
  };

  for (const char* f : {"trajectory.csv", "final.snapshot.txt", "equilibrium.snapshot.txt",
                        "equilibrium.json", "lambda.json", "model_check.json", "ls_fit.json"}) {
    REQUIRE(slurp(a / f) == slurp(b / f), std::string("output differs: ") + f);
  }
  REQUIRE(without_wall_time(slurp(a / "summary.json")) ==
              without_wall_time(slurp(b / "summary.json")),
          "summary differs beyond wall time");
  std::cout << "[PASS] 10 determinism: 8 outputs byte-identical across repeated runs\n";
}

}  // namespace

int main() {
  check_dissipation();
  check_conservation();
  ConvergedRuns data = check_convergence();
  check_stationary_solvers();
  check_lambda();
  check_exponent_fit(data);
  check_finite_length(data);
  check_gradient_exactness();
  check_lifts();
  check_determinism();
  std::cout << "all acceptance checks passed\n";
  return 0;
}
