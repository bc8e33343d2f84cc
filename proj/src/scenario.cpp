#include "dynbc/scenario.hpp"

#include "dynbc/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace dynbc {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& v, const std::string& origin, int line,
                    const std::string& key) {
  double out = 0.0;
  const char* begin = v.data();
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr != end)
    fail(origin, line, "key '" + key + "': cannot parse '" + v + "' as a number");
  return out;
}

long parse_long(const std::string& v, const std::string& origin, int line,
                const std::string& key) {
  long out = 0;
  const char* begin = v.data();
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr != end)
    fail(origin, line, "key '" + key + "': cannot parse '" + v + "' as an integer");
  return out;
}

std::uint64_t parse_u64(const std::string& v, const std::string& origin, int line,
                        const std::string& key) {
  std::uint64_t out = 0;
  const char* begin = v.data();
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr != end)
    fail(origin, line, "key '" + key + "': cannot parse '" + v + "' as an unsigned integer");
  return out;
}

bool parse_bool(const std::string& v, const std::string& origin, int line,
                const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  fail(origin, line, "key '" + key + "': expected true/false/1/0, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v, const std::string& origin, int line,
                                    const std::string& key) {
  std::vector<std::string> items;
  std::string cur;
  std::stringstream ss(v);
  while (std::getline(ss, cur, ',')) {
    const std::string item = trim(cur);
    if (item.empty()) fail(origin, line, "key '" + key + "': empty list item");
    items.push_back(item);
  }
  return items;
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-' || c == '.';
  });
}

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const std::set<std::string> kActions = {"check-model", "lambda",      "run",
                                        "equilibria",  "dissipation", "lojasiewicz"};

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  Scenario sc;
  sc.name.clear();
  bool saw_f = false;
  std::set<std::string> seen;

  std::stringstream stream(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(stream, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(origin, lineno, "expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(origin, lineno, "missing key before '='");
    if (!seen.insert(key).second) fail(origin, lineno, "duplicate key '" + key + "'");

    if (key == "name") {
      if (!valid_name(value))
        fail(origin, lineno, "name must be non-empty [A-Za-z0-9_.-], got '" + value + "'");
      sc.name = value;
    } else if (key == "mesh.dim") {
      sc.mesh.dim = static_cast<int>(parse_long(value, origin, lineno, key));
    } else if (key == "mesh.n") {
      sc.mesh.n = static_cast<int>(parse_long(value, origin, lineno, key));
    } else if (key == "mesh.nx") {
      sc.mesh.nx = static_cast<int>(parse_long(value, origin, lineno, key));
    } else if (key == "mesh.ny") {
      sc.mesh.ny = static_cast<int>(parse_long(value, origin, lineno, key));
    } else if (key == "mesh.length") {
      sc.mesh.length = parse_double(value, origin, lineno, key);
    } else if (key == "mesh.lx") {
      sc.mesh.lx = parse_double(value, origin, lineno, key);
    } else if (key == "mesh.ly") {
      sc.mesh.ly = parse_double(value, origin, lineno, key);
    } else if (key == "mu") {
      const long mu = parse_long(value, origin, lineno, key);
      if (mu != 0 && mu != 1) fail(origin, lineno, "mu must be 0 or 1");
      sc.mu = static_cast<int>(mu);
    } else if (key == "f.coeffs") {
      saw_f = true;
      for (const std::string& item : value.empty() ? std::vector<std::string>{}
                                                   : split_list(value, origin, lineno, key))
        sc.f_coeffs.push_back(parse_double(item, origin, lineno, key));
    } else if (key == "flow.dt0") {
      sc.flow.dt0 = parse_double(value, origin, lineno, key);
    } else if (key == "flow.dt_min") {
      sc.flow.dt_min = parse_double(value, origin, lineno, key);
    } else if (key == "flow.dt_max") {
      sc.flow.dt_max = parse_double(value, origin, lineno, key);
    } else if (key == "flow.t_end") {
      sc.flow.t_end = parse_double(value, origin, lineno, key);
    } else if (key == "flow.tol_stat") {
      sc.flow.tol_stat = parse_double(value, origin, lineno, key);
    } else if (key == "flow.scheme") {
      if (value == "semi_implicit")
        sc.flow.scheme = Scheme::semi_implicit;
      else if (value == "implicit")
        sc.flow.scheme = Scheme::implicit;
      else
        fail(origin, lineno, "flow.scheme must be semi_implicit or implicit, got '" + value + "'");
    } else if (key == "flow.newton_tol") {
      sc.flow.newton_tol = parse_double(value, origin, lineno, key);
    } else if (key == "flow.newton_max_iter") {
      sc.flow.newton_max_iter = static_cast<int>(parse_long(value, origin, lineno, key));
    } else if (key == "flow.record_every") {
      sc.flow.record_every = static_cast<int>(parse_long(value, origin, lineno, key));
    } else if (key == "flow.energy_backtrack") {
      sc.flow.energy_backtrack = parse_bool(value, origin, lineno, key);
    } else if (key == "init.kind") {
      if (value != "constant" && value != "fourier_random" && value != "file")
        fail(origin, lineno, "init.kind must be constant, fourier_random or file");
      sc.init.kind = value;
    } else if (key == "init.value") {
      sc.init.value = parse_double(value, origin, lineno, key);
    } else if (key == "init.seed") {
      sc.init.seed = parse_u64(value, origin, lineno, key);
    } else if (key == "init.amplitude") {
      sc.init.amplitude = parse_double(value, origin, lineno, key);
    } else if (key == "init.offset") {
      sc.init.offset = parse_double(value, origin, lineno, key);
    } else if (key == "init.path") {
      if (value.empty()) fail(origin, lineno, "init.path must not be empty");
      sc.init.path = value;
    } else if (key == "outputs") {
      if (value.empty()) fail(origin, lineno, "outputs must not be empty");
      sc.outputs = value;
    } else if (key == "actions") {
      for (const std::string& a : split_list(value, origin, lineno, key)) {
        if (!kActions.count(a)) fail(origin, lineno, "unknown action '" + a + "'");
        sc.actions.push_back(a);
      }
      if (sc.actions.empty()) fail(origin, lineno, "actions must not be empty");
    } else {
      fail(origin, lineno, "unknown key '" + key + "'");
    }
  }

  if (sc.mesh.dim != 1 && sc.mesh.dim != 2)
    throw ConfigError(origin + ": mesh.dim must be 1 or 2, got " + std::to_string(sc.mesh.dim));
  if (sc.mesh.dim == 1 && sc.mesh.n == 0)
    throw ConfigError(origin + ": mesh.n is required for mesh.dim = 1");
  if (sc.mesh.dim == 2 && (sc.mesh.nx == 0 || sc.mesh.ny == 0))
    throw ConfigError(origin + ": mesh.nx and mesh.ny are required for mesh.dim = 2");
  if (sc.init.kind == "file" && sc.init.path.empty())
    throw ConfigError(origin + ": init.kind = file needs init.path");

  sc.f_was_empty = !saw_f || sc.f_coeffs.empty();
  if (sc.actions.empty()) sc.actions.push_back("run");
  if (sc.name.empty()) {
    const std::string stem = std::filesystem::path(origin).stem().string();
    sc.name = (origin != "<memory>" && valid_name(stem)) ? stem : "scenario";
  }
  if (sc.outputs.empty()) sc.outputs = "out/" + sc.name;
  return sc;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

Mesh build_mesh(const MeshSpec& spec) {
  if (spec.dim == 1) return build_interval_mesh(spec.n, spec.length);
  if (spec.dim == 2) return build_rect_mesh(spec.nx, spec.ny, spec.lx, spec.ly);
  throw ConfigError("mesh.dim must be 1 or 2, got " + std::to_string(spec.dim));
}

Field make_initial(const InitSpec& init, const Mesh& mesh) {
  if (init.kind == "constant") return make_constant_field(mesh, init.value);
  if (init.kind == "fourier_random") {
    SplitMix64 rng(init.seed);
    return make_fourier_field(mesh, init.amplitude, init.offset, rng);
  }
  if (init.kind == "file") return load_snapshot(init.path, mesh);
  throw ConfigError("unknown init.kind '" + init.kind + "'");
}

void save_snapshot(const std::string& path, const Mesh& mesh, const Field& u) {
  if (u.mesh_id != mesh.id) throw ConfigError("save_snapshot: field from a different mesh");
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write snapshot '" + path + "'");
  out << "dim " << mesh.dim << "\n";
  if (mesh.dim == 1) {
    out << "shape " << mesh.nx << "\n";
    out << "spacing " << fmt_g17(mesh.spacing[0]) << "\n";
  } else {
    out << "shape " << mesh.nx << " " << mesh.ny << "\n";
    out << "spacing " << fmt_g17(mesh.spacing[0]) << " " << fmt_g17(mesh.spacing[1]) << "\n";
  }
  for (Eigen::Index i = 0; i < u.values.size(); ++i) out << fmt_g17(u.values(i)) << "\n";
  if (!out) throw ConfigError("write failed for snapshot '" + path + "'");
}

Field load_snapshot(const std::string& path, const Mesh& mesh) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open snapshot '" + path + "'");

  auto next_line = [&](const char* what) {
    std::string line;
    if (!std::getline(in, line))
      throw ConfigError("snapshot '" + path + "': missing " + what + " line");
    return line;
  };

  {
    std::istringstream hs(next_line("dim"));
    std::string tag;
    int dim = 0;
    if (!(hs >> tag >> dim) || tag != "dim")
      throw ConfigError("snapshot '" + path + "': malformed dim line");
    if (dim != mesh.dim)
      throw ConfigError("snapshot '" + path + "': dim " + std::to_string(dim) +
                        " does not match mesh dim " + std::to_string(mesh.dim));
  }
  {
    std::istringstream hs(next_line("shape"));
    std::string tag;
    if (!(hs >> tag) || tag != "shape")
      throw ConfigError("snapshot '" + path + "': malformed shape line");
    int nx = 0, ny = 0;
    if (!(hs >> nx)) throw ConfigError("snapshot '" + path + "': malformed shape line");
    if (mesh.dim == 2 && !(hs >> ny))
      throw ConfigError("snapshot '" + path + "': malformed shape line");
    if (nx != mesh.nx || (mesh.dim == 2 && ny != mesh.ny))
      throw ConfigError("snapshot '" + path + "': shape does not match the mesh");
  }
  {
    std::istringstream hs(next_line("spacing"));
    std::string tag;
    if (!(hs >> tag) || tag != "spacing")
      throw ConfigError("snapshot '" + path + "': malformed spacing line");
    for (int d = 0; d < mesh.dim; ++d) {
      double h = 0.0;
      if (!(hs >> h)) throw ConfigError("snapshot '" + path + "': malformed spacing line");
      if (std::abs(h - mesh.spacing[d]) > 1e-12 * std::max(1.0, std::abs(mesh.spacing[d])))
        throw ConfigError("snapshot '" + path + "': spacing does not match the mesh");
    }
  }

  Vector values(mesh.node_count);
  for (int i = 0; i < mesh.node_count; ++i) {
    const std::string line = trim(next_line("value"));
    values(i) = parse_double(line, path, 4 + i, "value");
  }
  return make_field(mesh, std::move(values));
}

}  // namespace dynbc
