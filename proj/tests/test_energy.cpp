#include "dynbc/energy.hpp"
#include "dynbc/errors.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace dynbc;

namespace {

Field random_field(const Mesh& mesh, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  SplitMix64 rng(seed);
  Vector v(mesh.node_count);
  for (int i = 0; i < mesh.node_count; ++i) v(i) = rng.uniform(lo, hi);
  return make_field(mesh, v);
}

}  // namespace

TEST_CASE("energy of constant states has closed form") {
  const Mesh mesh = build_interval_mesh(41, 1.0);
  const Operators ops = assemble_operators(mesh);
  const Field one = make_constant_field(mesh, 1.0);
  const Field zero = make_constant_field(mesh, 0.0);

  const ModelSpec m0 = make_model(0, {0.0, -1.0, 0.0, 1.0}, 1);
  const ModelSpec m1 = make_model(1, {0.0, -1.0, 0.0, 1.0}, 1);

  // F(1) = -1/4 over the unit interval; the boundary term adds 1/2 * 2 for mu=1.
  CHECK(energy(one, ops, m0) == doctest::Approx(-0.25).epsilon(1e-13));
  CHECK(energy(one, ops, m1) == doctest::Approx(0.75).epsilon(1e-13));
  CHECK(energy(zero, ops, m0) == 0.0);
  CHECK(energy(zero, ops, m1) == 0.0);
}

TEST_CASE("gradient vanishes at constant equilibria") {
  const Mesh mesh = build_interval_mesh(31, 1.0);
  const Operators ops = assemble_operators(mesh);
  const ModelSpec m0 = make_model(0, {0.0, -1.0, 0.0, 1.0}, 1);
  const Field one = make_constant_field(mesh, 1.0);
  const Field zero = make_constant_field(mesh, 0.0);
  CHECK(energy_gradient(one, ops, m0).lpNorm<Eigen::Infinity>() <= 1e-13);
  CHECK(energy_gradient(zero, ops, m0).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("gradient is the exact derivative of the energy") {
  for (const Mesh& mesh : {build_interval_mesh(21, 1.0), build_rect_mesh(5, 6, 1.0, 1.5)}) {
    const Operators ops = assemble_operators(mesh);
    for (int mu : {0, 1}) {
      const ModelSpec model = make_model(mu, {0.1, -1.0, 0.0, 1.0}, mesh.dim);
      const Field u = random_field(mesh, 100 + mu);
      const Vector g = energy_gradient(u, ops, model);
      const double e0 = energy(u, ops, model);
      for (std::uint64_t s = 0; s < 5; ++s) {
        const Field v = random_field(mesh, 200 + s);
        const double analytic = v.values.dot(g);
        const double numeric = oracle::central_diff(
            [&](double t) {
              Field w{u.values + t * v.values, u.mesh_id};
              return energy(w, ops, model);
            },
            1e-5);
        CHECK(std::abs(analytic - numeric) <= 1e-6 * (1.0 + std::abs(e0)));
      }
    }
  }
}

TEST_CASE("H1 norm closed forms") {
  const Mesh mesh = build_interval_mesh(101, 1.0);
  const Operators ops = assemble_operators(mesh);

  const Field c = make_constant_field(mesh, -3.0);
  CHECK(h1_norm(c, ops) == doctest::Approx(3.0 * std::sqrt(2.0)).epsilon(1e-13));

  Vector xv(mesh.node_count);
  for (int i = 0; i < mesh.node_count; ++i) xv(i) = mesh.node_coords(i, 0);
  const Field x = make_field(mesh, xv);
  // integral of 1 over the interval plus u(0)^2 + u(1)^2 = 1 + 0 + 1.
  CHECK(h1_norm(x, ops) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  CHECK(h1_dist(x, x, ops) == 0.0);
  CHECK(h1_dist(x, c, ops) == doctest::Approx(h1_dist(c, x, ops)).epsilon(1e-15));
}

TEST_CASE("dual norm round trip and dense oracle") {
  const Mesh mesh = build_interval_mesh(51, 1.0);
  const Operators ops = assemble_operators(mesh);

  CHECK(dual_norm(Vector::Zero(mesh.node_count), ops) == 0.0);

  const Field w = random_field(mesh, 4);
  const Vector r = ops.h1_matrix * w.values;
  CHECK(dual_norm(r, ops) == doctest::Approx(h1_norm(w, ops)).epsilon(1e-10));

  const Field any = random_field(mesh, 5);
  CHECK(dual_norm(any.values, ops) ==
        doctest::Approx(oracle::dual_norm(any.values, ops)).epsilon(1e-10));

  CHECK_THROWS_AS(dual_norm(Vector::Zero(7), ops), ConfigError);
}

TEST_CASE("dual norm matches the dense oracle in 2D") {
  const Mesh mesh = build_rect_mesh(9, 9, 1.0, 1.0);
  const Operators ops = assemble_operators(mesh);
  const Field any = random_field(mesh, 6);
  CHECK(dual_norm(any.values, ops) ==
        doctest::Approx(oracle::dual_norm(any.values, ops)).epsilon(1e-10));
}

TEST_CASE("L2 norms split into interior and boundary parts") {
  const Mesh mesh = build_interval_mesh(41, 1.0);
  const Operators ops = assemble_operators(mesh);

  const L2Norms n1 = l2_norms(make_constant_field(mesh, 1.0), ops);
  CHECK(n1.interior == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(n1.boundary == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));

  Vector v = Vector::Zero(mesh.node_count);
  v(mesh.node_count / 2) = 3.0;
  const L2Norms n2 = l2_norms(make_field(mesh, v), ops);
  CHECK(n2.boundary == 0.0);
  CHECK(n2.interior == doctest::Approx(3.0 * std::sqrt(ops.m_int(mesh.node_count / 2))).epsilon(1e-13));
}

TEST_CASE("Lp norms") {
  const Mesh mesh = build_interval_mesh(41, 1.0);
  const Operators ops = assemble_operators(mesh);
  const Field one = make_constant_field(mesh, 1.0);

  const LpNorms p4 = lp_norms(one, ops, 4.0);
  CHECK(p4.interior == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(p4.boundary == doctest::Approx(std::pow(2.0, 0.25)).epsilon(1e-13));

  const Field u = random_field(mesh, 8);
  const LpNorms p2 = lp_norms(u, ops, 2.0);
  const L2Norms l2 = l2_norms(u, ops);
  CHECK(p2.interior == doctest::Approx(l2.interior).epsilon(1e-14));
  CHECK(p2.boundary == doctest::Approx(l2.boundary).epsilon(1e-14));

  const LpNorms p3 = lp_norms(make_constant_field(mesh, 2.0), ops, 3.0);
  CHECK(p3.interior == doctest::Approx(2.0).epsilon(1e-13));

  CHECK_THROWS_AS(lp_norms(one, ops, 0.5), ConfigError);
}

TEST_CASE("field construction rejects non-finite values") {
  const Mesh mesh = build_interval_mesh(5, 1.0);
  Vector bad = Vector::Zero(5);
  bad(2) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(make_field(mesh, bad), NumericalError);
  bad(2) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(make_field(mesh, bad), NumericalError);
  CHECK_THROWS_AS(make_field(mesh, Vector::Zero(4)), ConfigError);
}

TEST_CASE("energy rejects fields from another mesh") {
  const Mesh a = build_interval_mesh(11, 1.0);
  const Mesh b = build_interval_mesh(11, 1.0);
  const Operators ops = assemble_operators(a);
  const ModelSpec model = make_model(0, {}, 1);
  CHECK_THROWS_AS(energy(make_constant_field(b, 1.0), ops, model), ConfigError);
}
