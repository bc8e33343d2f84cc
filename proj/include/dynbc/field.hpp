#pragma once

#include "dynbc/mesh.hpp"
#include "dynbc/rng.hpp"

#include <cstdint>

namespace dynbc {

// Nodal scalar field bound to the mesh it was built on. Construction rejects
// non-finite entries; operations reject fields from a different mesh.
struct Field {
  Vector values;
  std::uint64_t mesh_id = 0;
};

Field make_field(const Mesh& mesh, Vector values);
Field make_constant_field(const Mesh& mesh, double value);

// offset plus the five lowest cosine modes, coefficients uniform in
// [-amplitude, amplitude] drawn from rng in a fixed order (1D: k = 1..5;
// 2D: modes (1,0), (0,1), (1,1), (2,0), (0,2)).
Field make_fourier_field(const Mesh& mesh, double amplitude, double offset, SplitMix64& rng);

}  // namespace dynbc
