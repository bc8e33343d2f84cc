#pragma once

#include "dynbc/scenario.hpp"

#include <optional>
#include <string>

namespace dynbc {

struct RunOutcome {
  int exit_code = 0;     // 0 ok, 2 config, 3 numerical, 4 certificate declined
  std::string status;    // flow status or "error"
  std::string message;   // error text when exit_code != 0
};

// Executes the scenario's actions in pipeline order (check-model, lambda,
// run, equilibria, dissipation, lojasiewicz) and writes trajectory.csv,
// snapshot files, model_check.json / lambda.json / equilibrium.json /
// ls_fit.json and summary.json into out_dir. Fixed seeds give byte-identical
// outputs apart from the wall_time_s field of summary.json. Refuses to reuse
// a directory that already holds a summary.json unless force is set.
RunOutcome run_scenario(const Scenario& scenario, const std::string& out_dir,
                        bool force = false,
                        std::optional<std::uint64_t> seed_override = {});

}  // namespace dynbc
