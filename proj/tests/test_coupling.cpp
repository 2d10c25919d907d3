#include <doctest.h>

#include <cmath>

#include "mcced/coupling.hpp"

using namespace mcced;

namespace {

Worldline orbit(double radius, double omega, double phase) {
  auto f = [=](double t, Vec3& r, Vec3& v, Vec3& a) {
    const double th = omega * t + phase;
    r = Vec3(radius * std::cos(th), radius * std::sin(th), 0.0);
    v = Vec3(-radius * omega * std::sin(th), radius * omega * std::cos(th), 0.0);
    a = -omega * omega * r;
  };
  return Worldline::from_function(f, -40.0, 40.0, 0.01);
}

Scenario three_body(double p) {
  Scenario s;
  for (int k = 0; k < 3; ++k) {
    Particle q;
    q.charge = 1.0 - 0.6 * k;
    q.worldline = orbit(1.0 + k, 0.2 / (1.0 + k), 2.0 * k);
    s.particles.push_back(q);
  }
  s.topology.p = p;
  return s;
}

double diff(const FieldTensor& a, const FieldTensor& b) {
  return max_abs_diff(a, b) / std::max(a.max_abs(), b.max_abs());
}

}  // namespace

TEST_CASE("decomposition parts sum to the total") {
  const Scenario s = three_body(0.7);
  const FourVector x = make_four(0.3, Vec3(5.0, -2.0, 1.0));
  for (std::size_t k = 0; k < 3; ++k) {
    const ObservedFieldDecomposition d = decompose_observed(s, k, x);
    CHECK(diff(d.ret_part + d.adv_part + d.rad_part + d.external_part, d.total) < 1e-14);
  }
}

TEST_CASE("observed field equals the TCRF form") {
  for (double p : {1.0, -1.0, 0.4}) {
    const Scenario s = three_body(p);
    const FourVector x = make_four(-0.8, Vec3(-3.0, 4.0, 2.0));
    for (std::size_t k = 0; k < 3; ++k) {
      FieldTensor expected;
      for (std::size_t j = 0; j < 3; ++j) {
        const SourceFields f = source_fields(s, j, x, false);
        if (j != k) expected += f.half_sum;
        expected += p * f.half_difference;
      }
      CHECK(diff(observed_field(s, k, x), expected) < 1e-13);
    }
  }
}

TEST_CASE("tcrf is the sum of the minus fields") {
  const Scenario s = three_body(1.0);
  const FourVector x = make_four(1.1, Vec3(2.0, 2.0, -3.0));
  FieldTensor sum;
  for (std::size_t j = 0; j < 3; ++j)
    sum += field_half_difference(s.worldline(j), s.particles[j].charge, x);
  CHECK(diff(tcrf_field(s, x), sum) < 1e-14);
}

TEST_CASE("ced boundaries relate incoming and outgoing fields") {
  Scenario s = three_body(1.0);
  s.topology.mode = CouplingMode::ced;
  ExternalField wave;
  wave.kind = ExternalField::Kind::plane_wave;
  wave.amplitude = 0.1;
  wave.direction = Vec3(0.0, 0.0, 1.0);
  wave.polarization = Vec3(0.0, 1.0, 0.0);
  s.topology.free_field = wave;
  const FourVector x = make_four(0.5, Vec3(4.0, 1.0, -1.0));
  const FieldTensor declared = external_field_at(wave, x);
  const FieldTensor minus = tcrf_field(s, x);

  s.topology.boundary = CedBoundary::sommerfeld;
  CHECK(diff(free_field_at(s, x), declared + minus) < 1e-14);
  s.topology.boundary = CedBoundary::outgoing;
  CHECK(diff(free_field_at(s, x), declared - minus) < 1e-14);
  s.topology.boundary = CedBoundary::free_field;
  CHECK(diff(free_field_at(s, x), declared) < 1e-14);
}

TEST_CASE("scenario invariants") {
  Scenario s = three_body(1.0);
  CHECK_NOTHROW(s.validate());
  s.topology.p = 0.0;
  CHECK_THROWS_AS(s.validate(), Error);
  s.topology.p = 1.0;
  s.particles.resize(1);
  CHECK_THROWS_AS(s.validate(), Error);
  s = three_body(1.0);
  s.topology.free_field.kind = ExternalField::Kind::plane_wave;
  CHECK_THROWS_AS(s.validate(), Error);
  s = three_body(1.0);
  s.particles[1].velocity = Vec3(1.0, 0.0, 0.0);
  CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("a field point on a worldline is a singularity unless renormalized") {
  const Scenario s = three_body(1.0);
  const FourVector on = s.worldline(0).state_at(0.0).position;
  try {
    source_fields(s, 0, on, false);
    FAIL("expected a singularity error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::singularity);
  }
  const SourceFields f = source_fields(s, 0, on, true);
  CHECK(f.on_worldline);
  CHECK(f.half_sum.max_abs() == 0.0);
}
