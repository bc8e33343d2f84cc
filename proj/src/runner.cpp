#include "dynbc/runner.hpp"

#include "dynbc/equilibrium.hpp"
#include "dynbc/errors.hpp"
#include "dynbc/log.hpp"
#include "dynbc/lojasiewicz.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace dynbc {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// JSON has no +-inf; serialize them (and NaN) as strings so nothing becomes
// a silent null.
json num_or_str(double v) {
  if (std::isnan(v)) return json("nan");
  if (std::isinf(v)) return json(v > 0 ? "inf" : "-inf");
  return json(v);
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << content;
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string csv_of(const TrajectoryRecord& rec) {
  std::string out = "t,E,ut_l2,ut_bnd_l2,grad_dual,h1_dist_ref,lp_int,lp_bnd\n";
  for (size_t i = 0; i < rec.times.size(); ++i) {
    out += fmt_g17(rec.times[i]);
    out += ',';
    out += fmt_g17(rec.energies[i]);
    out += ',';
    out += fmt_g17(rec.ut_l2[i]);
    out += ',';
    out += fmt_g17(rec.ut_bnd_l2[i]);
    out += ',';
    out += fmt_g17(rec.grad_dual[i]);
    out += ',';
    out += fmt_g17(rec.h1_dist_ref[i]);
    out += ',';
    out += fmt_g17(rec.lp_interior[i]);
    out += ',';
    out += fmt_g17(rec.lp_boundary[i]);
    out += '\n';
  }
  return out;
}

}  // namespace

RunOutcome run_scenario(const Scenario& scenario, const std::string& out_dir, bool force,
                        std::optional<std::uint64_t> seed_override) {
  const auto t_start = std::chrono::steady_clock::now();
  json summary;
  std::vector<std::string> warnings;
  bool summary_allowed = false;

  auto wall_time = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  };
  auto finalize = [&](int code, const std::string& status, const std::string& message) {
    summary["status"] = status;
    summary["exit_code"] = code;
    if (!message.empty()) summary["message"] = message;
    summary["warnings"] = warnings;
    summary["wall_time_s"] = wall_time();
    if (summary_allowed) {
      try {
        write_json(out_dir + "/summary.json", summary);
      } catch (const ConfigError& e) {
        log_error(std::string("summary write failed: ") + e.what());
      }
    }
  };

  try {
    fs::create_directories(out_dir);
    if (fs::exists(out_dir + "/summary.json") && !force)
      throw ConfigError("output directory '" + out_dir +
                        "' already holds a summary.json; pass force to overwrite");
    summary_allowed = true;

    Scenario sc = scenario;
    if (seed_override) sc.init.seed = *seed_override;

    std::set<std::string> want(sc.actions.begin(), sc.actions.end());
    if (want.count("lojasiewicz")) {
      want.insert("run");
      want.insert("equilibria");
    }
    if (want.count("dissipation")) want.insert("run");

    const Mesh mesh = build_mesh(sc.mesh);
    const Operators ops = assemble_operators(mesh);
    ModelSpec model = make_model(sc.mu, sc.f_coeffs, mesh.dim);
    if (sc.f_was_empty) warnings.push_back("f.coeffs not given; running with f identically zero");

    summary["name"] = sc.name;
    summary["mu"] = sc.mu;
    summary["f_coeffs"] = sc.f_coeffs;
    summary["actions"] = sc.actions;
    json jm;
    jm["dim"] = mesh.dim;
    if (mesh.dim == 1) {
      jm["n"] = mesh.nx;
      jm["length"] = mesh.lengths[0];
    } else {
      jm["nx"] = mesh.nx;
      jm["ny"] = mesh.ny;
      jm["lx"] = mesh.lengths[0];
      jm["ly"] = mesh.lengths[1];
    }
    summary["mesh"] = jm;
    if (sc.init.kind == "fourier_random") summary["seed"] = sc.init.seed;

    std::optional<LambdaResult> lambda_res;
    auto ensure_lambda = [&] {
      if (!lambda_res) {
        lambda_res = compute_lambda(ops);
        model.lambda = lambda_res->lambda;
        log_info("lambda = " + fmt_g17(lambda_res->lambda));
      }
    };

    if (want.count("check-model")) {
      const F2Report f2 = check_F2(model.f, model.mesh_dim);
      double lam = 0.0;
      if (model.mu == 1) {
        ensure_lambda();
        lam = lambda_res->lambda;
      }
      const F3Report f3 = check_F3(model.f, model.mu, lam);
      json mc;
      mc["f2"] = {{"pass", f2.pass},
                  {"growth_p", f2.growth_p},
                  {"alpha", num_or_str(f2.alpha)},
                  {"mesh_dim", f2.mesh_dim}};
      mc["f3"] = {{"pass", f3.pass},
                  {"liminf", num_or_str(f3.liminf)},
                  {"threshold", f3.threshold},
                  {"mu", f3.mu}};
      write_json(out_dir + "/model_check.json", mc);
      summary["model_check"] = {{"f2_pass", f2.pass}, {"f3_pass", f3.pass}};
      if (!f2.pass)
        throw ConfigError("growth check failed: p = " + fmt_g17(f2.growth_p) +
                          " is not below alpha = " + fmt_g17(f2.alpha));
      if (!f3.pass)
        warnings.push_back("sign condition fails (liminf f(s)/s = " + fmt_g17(f3.liminf) +
                           ", threshold " + fmt_g17(f3.threshold) +
                           "); boundedness is not guaranteed");
    }

    if (want.count("lambda")) {
      ensure_lambda();
      json lj;
      lj["lambda"] = lambda_res->lambda;
      lj["iterations"] = lambda_res->iterations;
      lj["residual"] = lambda_res->residual;
      lj["mesh"] = jm;
      write_json(out_dir + "/lambda.json", lj);
      summary["lambda"] = lambda_res->lambda;
    }

    std::optional<TrajectoryRecord> rec;
    if (want.count("run")) {
      const Field u0 = make_initial(sc.init, mesh);
      rec = run_trajectory(u0, sc.flow, ops, model);
      write_text(out_dir + "/trajectory.csv", csv_of(*rec));
      const Field final_state{rec->snapshots.back(), rec->mesh_id};
      save_snapshot(out_dir + "/final.snapshot.txt", mesh, final_state);
      json jr;
      jr["status"] = to_string(rec->status);
      jr["scheme"] = to_string(rec->config.scheme);
      jr["steps_accepted"] = rec->steps_accepted;
      jr["steps_rejected"] = rec->steps_rejected;
      jr["records"] = rec->times.size();
      jr["t_final"] = rec->times.back();
      jr["final_dt"] = rec->final_dt;
      jr["final_energy"] = rec->energies.back();
      jr["final_ut"] = std::sqrt(rec->ut_l2.back() * rec->ut_l2.back() +
                                 rec->ut_bnd_l2.back() * rec->ut_bnd_l2.back());
      jr["final_grad_dual"] = rec->grad_dual.back();
      summary["run"] = jr;
    }

    std::optional<EquilibriumRecord> eq;
    if (want.count("equilibria")) {
      if (rec) {
        const Field last{rec->snapshots.back(), rec->mesh_id};
        eq = solve_stationary(last, ops, model);
      } else {
        const auto guesses = multistart_guesses(mesh, model, 8, sc.init.seed);
        for (const Field& g : guesses) {
          try {
            const EquilibriumRecord cand = minimize_energy(g, ops, model);
            if (!eq || cand.energy < eq->energy) eq = cand;
          } catch (const SolverError& e) {
            log_debug(std::string("multistart guess rejected: ") + e.what());
          }
        }
        if (!eq) throw NumericalError("equilibria: no multistart guess converged");
      }
      save_snapshot(out_dir + "/equilibrium.snapshot.txt", mesh, eq->psi);
      json je;
      je["energy"] = eq->energy;
      je["grad_dual"] = eq->grad_dual;
      je["hess_min_eig"] = eq->hess_min_eig;
      je["nondegenerate"] = eq->nondegenerate;
      je["snapshot_path"] = "equilibrium.snapshot.txt";
      write_json(out_dir + "/equilibrium.json", je);
      je.erase("snapshot_path");
      summary["equilibrium"] = je;
    }

    if (want.count("dissipation")) {
      const DissipationReport dr = dissipation_check(*rec);
      const LpBoundReport lp = lp_bound_monitor(*rec);
      summary["dissipation"] = {{"max_identity_residual", dr.max_identity_residual},
                                {"max_energy_increase", dr.max_energy_increase},
                                {"n_intervals", dr.n_intervals}};
      summary["lp_bound"] = {{"sup_value", lp.sup_value},
                             {"initial", lp.initial},
                             {"final_value", lp.final_value},
                             {"bounded", lp.bounded}};
    }

    bool declined = false;
    std::string declined_reason;
    if (want.count("lojasiewicz")) {
      const LojasiewiczFit fit = estimate_theta(*rec, *eq, ops, model);
      json jf;
      jf["theta"] = fit.theta;
      jf["one_minus_theta"] = fit.one_minus_theta;
      jf["r_squared"] = fit.r_squared;
      jf["window"] = {fit.window_lo, fit.window_hi};
      jf["n_points"] = fit.n_points;
      jf["constant_c"] = fit.constant_c;
      jf["violated"] = fit.violated;
      jf["unreliable"] = fit.unreliable;
      write_json(out_dir + "/ls_fit.json", jf);

      const FiniteLengthReport fl = finite_length_check(*rec, *eq, fit);
      const ConvergenceCertificate cert = convergence_certificate(*rec, *eq, ops, &fit);
      json jl;
      jl["theta"] = fit.theta;
      jl["unreliable"] = fit.unreliable;
      jl["violated"] = fit.violated;
      jl["finite_length"] = {{"total_integral", fl.total_integral},
                             {"tail_integral", fl.tail_integral},
                             {"tail_fraction", fl.tail_fraction},
                             {"tail_ok", fl.tail_ok},
                             {"window_entered", fl.window_entered},
                             {"bound_value", fl.bound_value},
                             {"slack", fl.slack},
                             {"bound_ok", fl.bound_ok}};
      jl["certificate"] = {{"accepted", cert.accepted},
                           {"reason", cert.reason},
                           {"final_h1_dist", cert.final_h1_dist},
                           {"final_ut", cert.final_ut},
                           {"tail_monotone", cert.tail_monotone}};
      summary["lojasiewicz"] = jl;

      if (fit.unreliable) warnings.push_back("ls fit unreliable (few points or poor fit)");
      if (!cert.accepted) {
        declined = true;
        declined_reason = "convergence certificate declined (" + cert.reason + ")";
      }
      if (fit.violated) {
        declined = true;
        if (!declined_reason.empty()) declined_reason += "; ";
        declined_reason += "gradient inequality violated inside the fit window";
      }
    }

    int code = 0;
    std::string message;
    std::string status = rec ? to_string(rec->status) : "ok";
    if (rec && rec->status == FlowStatus::blow_up) {
      code = 4;
      message = "state exceeded the blow-up threshold";
    }
    if (declined) {
      code = 4;
      message = message.empty() ? declined_reason : message + "; " + declined_reason;
    }
    finalize(code, status, message);
    return {code, status, message};
  } catch (const ConfigError& e) {
    log_error(e.what());
    finalize(2, "error", e.what());
    return {2, "error", e.what()};
  } catch (const NumericalError& e) {
    log_error(e.what());
    finalize(3, "error", e.what());
    return {3, "error", e.what()};
  } catch (const fs::filesystem_error& e) {
    log_error(e.what());
    finalize(2, "error", e.what());
    return {2, "error", e.what()};
  } catch (const std::exception& e) {
    log_error(e.what());
    finalize(3, "error", e.what());
    return {3, "error", e.what()};
  }
}

}  // namespace dynbc
