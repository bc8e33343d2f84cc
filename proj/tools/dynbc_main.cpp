#include "dynbc/errors.hpp"
#include "dynbc/log.hpp"
#include "dynbc/model.hpp"
#include "dynbc/runner.hpp"
#include "dynbc/scenario.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace {

using nlohmann::json;

json num_or_str(double v) {
  if (std::isnan(v)) return json("nan");
  if (std::isinf(v)) return json(v > 0 ? "inf" : "-inf");
  return json(v);
}

int cmd_run(const std::vector<std::string>& files, const std::string& out_override,
            std::optional<std::uint64_t> seed, bool force, int jobs) {
  if (!out_override.empty() && files.size() > 1)
    throw dynbc::ConfigError("--out works with a single scenario file only");

  std::vector<dynbc::Scenario> scenarios;
  std::vector<std::string> out_dirs;
  for (const std::string& path : files) {
    scenarios.push_back(dynbc::load_scenario_file(path));
    out_dirs.push_back(out_override.empty() ? scenarios.back().outputs : out_override);
  }

  std::vector<dynbc::RunOutcome> outcomes(scenarios.size());
  std::atomic<size_t> cursor{0};
  auto worker = [&] {
    while (true) {
      const size_t i = cursor.fetch_add(1);
      if (i >= scenarios.size()) break;
      outcomes[i] = dynbc::run_scenario(scenarios[i], out_dirs[i], force, seed);
    }
  };
  const int pool_size = std::max(1, std::min<int>(jobs, static_cast<int>(scenarios.size())));
  if (pool_size == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(pool_size));
    for (int k = 0; k < pool_size; ++k) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  int exit_code = 0;
  for (size_t i = 0; i < scenarios.size(); ++i) {
    std::printf("%s: %s (exit %d)%s%s\n", scenarios[i].name.c_str(), outcomes[i].status.c_str(),
                outcomes[i].exit_code, outcomes[i].message.empty() ? "" : " - ",
                outcomes[i].message.c_str());
    exit_code = std::max(exit_code, outcomes[i].exit_code);
  }
  return exit_code;
}

int cmd_lambda(int dim, int n, int nx, int ny, double length, double lx, double ly) {
  dynbc::Mesh mesh;
  if (dim == 1) {
    mesh = dynbc::build_interval_mesh(n, length);
  } else {
    mesh = dynbc::build_rect_mesh(nx > 0 ? nx : n, ny > 0 ? ny : n, lx, ly);
  }
  const dynbc::Operators ops = dynbc::assemble_operators(mesh);
  const dynbc::LambdaResult res = dynbc::compute_lambda(ops);

  json j;
  j["lambda"] = res.lambda;
  j["iterations"] = res.iterations;
  j["residual"] = res.residual;
  j["dim"] = mesh.dim;
  if (dim == 1) {
    j["n"] = mesh.nx;
    j["length"] = mesh.lengths[0];
  } else {
    j["nx"] = mesh.nx;
    j["ny"] = mesh.ny;
    j["lx"] = mesh.lengths[0];
    j["ly"] = mesh.lengths[1];
  }
  std::printf("%s\n", j.dump(2).c_str());
  return 0;
}

int cmd_check_model(const std::string& path) {
  const dynbc::Scenario sc = dynbc::load_scenario_file(path);
  const dynbc::Mesh mesh = dynbc::build_mesh(sc.mesh);
  const dynbc::ModelSpec model = dynbc::make_model(sc.mu, sc.f_coeffs, mesh.dim);

  const dynbc::F2Report f2 = dynbc::check_F2(model.f, model.mesh_dim);
  double lambda = 0.0;
  if (model.mu == 1) {
    const dynbc::Operators ops = dynbc::assemble_operators(mesh);
    lambda = dynbc::compute_lambda(ops).lambda;
  }
  const dynbc::F3Report f3 = dynbc::check_F3(model.f, model.mu, lambda);

  json j;
  j["f2"] = {{"pass", f2.pass},
             {"growth_p", f2.growth_p},
             {"alpha", num_or_str(f2.alpha)},
             {"mesh_dim", f2.mesh_dim}};
  j["f3"] = {{"pass", f3.pass},
             {"liminf", num_or_str(f3.liminf)},
             {"threshold", f3.threshold},
             {"mu", f3.mu}};
  std::printf("%s\n", j.dump(2).c_str());
  if (!f2.pass) {
    std::fprintf(stderr, "growth check failed\n");
    return 2;
  }
  if (!f3.pass) std::fprintf(stderr, "warning: sign condition fails; boundedness not guaranteed\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulator and verification toolkit for the heat flow with a dynamical boundary "
               "condition",
               "dynbc"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "execute scenario files and write their artifacts");
  std::vector<std::string> files;
  std::string out_override;
  std::uint64_t seed = 0;
  bool force = false;
  int jobs = 1;
  run->add_option("scenarios", files, "scenario files")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_override, "output directory (single scenario only)");
  auto* seed_opt = run->add_option("--seed", seed, "override init.seed");
  run->add_flag("--force", force, "reuse an output directory that already holds results");
  run->add_option("--jobs", jobs, "run up to K scenarios concurrently")
      ->check(CLI::PositiveNumber);

  auto* lam = app.add_subcommand("lambda",
                                 "smallest eigenvalue of the stiffness-plus-boundary-mass pencil");
  int dim = 1, n = 101, nx = 0, ny = 0;
  double length = 1.0, lx = 1.0, ly = 1.0;
  lam->add_option("--dim", dim, "1 or 2")->check(CLI::Range(1, 2));
  lam->add_option("--n", n, "node count (1D, or per axis in 2D when --nx/--ny absent)");
  lam->add_option("--nx", nx, "2D nodes along x");
  lam->add_option("--ny", ny, "2D nodes along y");
  lam->add_option("--length", length, "1D interval length");
  lam->add_option("--lx", lx, "2D extent along x");
  lam->add_option("--ly", ly, "2D extent along y");

  auto* chk = app.add_subcommand("check-model", "evaluate the growth and sign conditions");
  std::string chk_file;
  chk->add_option("scenario", chk_file, "scenario file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      std::optional<std::uint64_t> seed_override;
      if (seed_opt->count() > 0) seed_override = seed;
      return cmd_run(files, out_override, seed_override, force, jobs);
    }
    if (lam->parsed()) return cmd_lambda(dim, n, nx, ny, length, lx, ly);
    return cmd_check_model(chk_file);
  } catch (const dynbc::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const dynbc::NumericalError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
