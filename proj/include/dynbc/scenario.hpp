#pragma once

#include "dynbc/field.hpp"
#include "dynbc/flow.hpp"
#include "dynbc/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dynbc {

struct MeshSpec {
  int dim = 1;
  int n = 0;            // 1D node count
  int nx = 0, ny = 0;   // 2D node counts
  double length = 1.0;  // 1D
  double lx = 1.0, ly = 1.0;
};

struct InitSpec {
  std::string kind = "constant";  // constant | fourier_random | file
  double value = 0.0;
  std::uint64_t seed = 0;
  double amplitude = 0.5;
  double offset = 0.0;
  std::string path;
};

struct Scenario {
  std::string name;
  MeshSpec mesh;
  int mu = 0;
  std::vector<double> f_coeffs;
  FlowConfig flow;
  InitSpec init;
  std::string outputs;               // output directory
  std::vector<std::string> actions;  // subset of check-model, lambda, run,
                                     // equilibria, dissipation, lojasiewicz
  bool f_was_empty = false;          // empty f_coeffs accepted as f == 0
};

// Parses the key = value scenario format (# comments, dotted keys). Unknown
// or duplicate keys raise ConfigError naming the offending key and line.
Scenario parse_scenario(const std::string& text, const std::string& origin = "<memory>");
Scenario load_scenario_file(const std::string& path);

Mesh build_mesh(const MeshSpec& spec);

// constant | fourier_random (lowest 5 cosine modes, coefficients uniform in
// [-amplitude, amplitude] from a splitmix64 stream) | file.
Field make_initial(const InitSpec& init, const Mesh& mesh);

// Flat node-value text, 3-line header (dim, shape, spacing), %.17g values:
// round-trips doubles exactly.
void save_snapshot(const std::string& path, const Mesh& mesh, const Field& u);
Field load_snapshot(const std::string& path, const Mesh& mesh);

}  // namespace dynbc
