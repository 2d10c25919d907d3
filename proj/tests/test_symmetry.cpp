#include <doctest.h>

#include "mcced/harness.hpp"
#include "mcced/symmetry.hpp"

using namespace mcced;

TEST_CASE("operators are involutions over random scenarios") {
  const CheckResult r = involution_check(20240611, 100);
  CHECK_MESSAGE(r.pass, r.detail);
}

TEST_CASE("parity table") {
  for (const CheckResult& c : parity_table()) CHECK_MESSAGE(c.pass, c.name << ": " << c.detail);
}

TEST_CASE("event and field images") {
  const FourVector x = make_four(1.0, Vec3(2.0, 3.0, 4.0));
  CHECK(map_event(x, SymmetryOp::Tt) == make_four(-1.0, Vec3(2.0, 3.0, 4.0)));
  CHECK(map_event(x, SymmetryOp::P) == make_four(1.0, Vec3(-2.0, -3.0, -4.0)));
  CHECK(map_event(x, SymmetryOp::CPT) == -x);
  CHECK(map_event(x, SymmetryOp::C) == x);
  FieldTensor F;
  F.E = Vec3(1.0, 2.0, 3.0);
  F.B = Vec3(-1.0, 0.5, 0.0);
  CHECK(map_field(F, SymmetryOp::Tt).E == F.E);
  CHECK(map_field(F, SymmetryOp::Tt).B == -F.B);
  CHECK(map_field(F, SymmetryOp::P).E == -F.E);
  CHECK(map_field(F, SymmetryOp::P).B == F.B);
}

TEST_CASE("scenario images") {
  Scenario s;
  Particle a, b;
  a.position = Vec3(1.0, 0.0, 0.0);
  a.velocity = Vec3(0.1, 0.2, 0.0);
  b.charge = -2.0;
  s.particles = {a, b};
  s.external.kind = ExternalField::Kind::uniform_magnetic;
  s.external.amplitude = 0.5;
  const Scenario t = apply_symmetry(s, SymmetryOp::Tt);
  CHECK(t.particles[0].velocity == -a.velocity);
  CHECK(t.external.amplitude == -0.5);
  CHECK(t.topology.p == 1.0);
  const Scenario tp = apply_symmetry(s, SymmetryOp::Tp);
  CHECK(tp.topology.p == -1.0);
  CHECK(tp.integrator.method == IntegratorMethod::nbody_advanced);
  const Scenario c = apply_symmetry(s, SymmetryOp::C);
  CHECK(c.particles[1].charge == 2.0);
  CHECK(c.external.amplitude == -0.5);
  s.external.switch_on = 1.0;
  CHECK_THROWS_AS(apply_symmetry(s, SymmetryOp::Tt), Error);
}

TEST_CASE("ced contrast requires a ced scenario") {
  Scenario s;
  s.particles = {Particle{}, Particle{}};
  s.particles[1].position = Vec3(1.0, 0.0, 0.0);
  CHECK_THROWS_AS(ced_parity_contrast(s, {make_four(0.0, Vec3(5.0, 0.0, 0.0))}), Error);
}

TEST_CASE("string forms round trip") {
  for (SymmetryOp op : kAllSymmetryOps) CHECK(symmetry_op_from_string(to_string(op)) == op);
  CHECK_FALSE(symmetry_op_from_string("Q").has_value());
  CHECK(field_functional_from_string("tcrf") == FieldFunctional::tcrf);
}
