#include "dynbc/field.hpp"

#include "dynbc/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace dynbc {

Field make_field(const Mesh& mesh, Vector values) {
  if (values.size() != mesh.node_count)
    throw ConfigError("make_field: got " + std::to_string(values.size()) + " values for a mesh with " +
                      std::to_string(mesh.node_count) + " nodes");
  if (!values.allFinite()) throw NumericalError("make_field: non-finite value in field data");
  Field f;
  f.values = std::move(values);
  f.mesh_id = mesh.id;
  return f;
}

Field make_constant_field(const Mesh& mesh, double value) {
  return make_field(mesh, Vector::Constant(mesh.node_count, value));
}

Field make_fourier_field(const Mesh& mesh, double amplitude, double offset, SplitMix64& rng) {
  constexpr double pi = std::numbers::pi;
  Vector v = Vector::Constant(mesh.node_count, offset);
  if (mesh.dim == 1) {
    const double lx = mesh.lengths[0];
    for (int k = 1; k <= 5; ++k) {
      const double c = rng.uniform(-amplitude, amplitude);
      for (int i = 0; i < mesh.node_count; ++i)
        v(i) += c * std::cos(k * pi * mesh.node_coords(i, 0) / lx);
    }
  } else {
    static constexpr int modes[5][2] = {{1, 0}, {0, 1}, {1, 1}, {2, 0}, {0, 2}};
    const double lx = mesh.lengths[0];
    const double ly = mesh.lengths[1];
    for (const auto& m : modes) {
      const double c = rng.uniform(-amplitude, amplitude);
      for (int i = 0; i < mesh.node_count; ++i)
        v(i) += c * std::cos(m[0] * pi * mesh.node_coords(i, 0) / lx) *
                std::cos(m[1] * pi * mesh.node_coords(i, 1) / ly);
    }
  }
  return make_field(mesh, std::move(v));
}

}  // namespace dynbc
