#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mcced/dynamics.hpp"
#include "mcced/lienard_wiechert.hpp"

using namespace mcced;

namespace {

constexpr double kPi = std::numbers::pi;

// Field of a uniformly moving charge from its present position.
Vec3 heaviside_field(double e, const Vec3& v, const Vec3& present_offset) {
  const double v2 = v.squaredNorm();
  const double R = present_offset.norm();
  const double sin2 = v2 > 0 ? 1.0 - std::pow(present_offset.dot(v) / (R * std::sqrt(v2)), 2) : 0.0;
  return e * (1.0 - v2) / (4.0 * kPi * R * R * R * std::pow(1.0 - v2 * sin2, 1.5)) * present_offset;
}

}  // namespace

TEST_CASE("static charge gives the Coulomb field") {
  const Worldline w = Worldline::inertial(Vec3(1.0, 0.0, 0.0), Vec3::Zero());
  for (double r : {1.0, 10.0, 100.0}) {
    const FourVector x = make_four(0.0, Vec3(1.0 + r, 0.0, 0.0));
    const FieldTensor F = lw_field(w, 2.0, x, LightConeBranch::retarded);
    CHECK(F.E(0) == doctest::Approx(2.0 / (4 * kPi * r * r)).epsilon(1e-13));
    CHECK(F.B.norm() == 0.0);
  }
}

TEST_CASE("uniform motion matches the Heaviside field") {
  for (double speed : {0.3, 0.6, 0.9}) {
    const Vec3 v = speed * Vec3(0.0, 1.0, 1.0).normalized();
    const Worldline w = Worldline::inertial(Vec3::Zero(), v);
    const double t = 1.5;
    const Vec3 point(2.0, -1.0, 0.5);
    const FieldTensor F = lw_field(w, 1.0, make_four(t, point), LightConeBranch::retarded);
    const Vec3 E = heaviside_field(1.0, v, point - v * t);
    CHECK((F.E - E).norm() / E.norm() < 1e-12);
    CHECK((F.B - v.cross(E)).norm() / E.norm() < 1e-12);
  }
}

TEST_CASE("light cone times of an inertial source") {
  const Worldline w = Worldline::inertial(Vec3::Zero(), Vec3::Zero());
  const FourVector x = make_four(10.0, Vec3(3.0, 4.0, 0.0));
  CHECK(light_cone_time(w, x, LightConeBranch::retarded) == doctest::Approx(5.0));
  CHECK(light_cone_time(w, x, LightConeBranch::advanced) == doctest::Approx(15.0));
  LightConeOptions tight;
  tight.horizon = 1.0;
  CHECK_THROWS_AS(light_cone_time(w, x, LightConeBranch::retarded, tight), Error);
}

TEST_CASE("radiated flux through a large sphere equals the Larmor power") {
  // x(t) = A cos t: at t = 0 the charge is at rest with acceleration −A.
  const double A = 1e-3, e = 1.0;
  auto traj = [&](double t, Vec3& r, Vec3& v, Vec3& a) {
    r = Vec3(A * std::cos(t), 0.0, 0.0);
    v = Vec3(-A * std::sin(t), 0.0, 0.0);
    a = Vec3(-A * std::cos(t), 0.0, 0.0);
  };
  const double R = 1e4;
  const Worldline w = Worldline::from_function(traj, -5.0, 5.0, 0.001);
  const int nth = 64, nph = 32;
  double power = 0.0;
  for (int i = 0; i < nth; ++i) {
    const double ct = -1.0 + (i + 0.5) * 2.0 / nth;
    const double st = std::sqrt(1.0 - ct * ct);
    for (int j = 0; j < nph; ++j) {
      const double ph = (j + 0.5) * 2.0 * kPi / nph;
      const Vec3 n(ct, st * std::cos(ph), st * std::sin(ph));
      const FieldParts parts = lw_field_parts(w, e, make_four(R + A * ct, Vec3(R * n)),
                                              LightConeBranch::retarded);
      const Vec3 S = parts.radiation.E.cross(parts.radiation.B);
      power += S.dot(n) * R * R * (2.0 / nth) * (2.0 * kPi / nph);
    }
  }
  const double larmor = larmor_power(make_four(1.0, Vec3(Vec3::Zero())), make_four(0.0, Vec3(-A, 0, 0)), e);
  CHECK(power == doctest::Approx(larmor).epsilon(1e-3));
  CHECK(larmor == doctest::Approx(2.0 / 3.0 * e * e / (4 * kPi) * A * A));
}

TEST_CASE("minus field vanishes for an inertial source") {
  const Worldline w = Worldline::inertial(Vec3(0.5, 0.0, 0.0), Vec3(0.4, 0.1, 0.0));
  CHECK(field_half_difference(w, 1.0, make_four(2.0, Vec3(1.0, 2.0, 3.0))).max_abs() < 1e-15);
  CHECK(minus_field_on_worldline(w, 1.0, 1.0).max_abs() < 1e-12);
}

TEST_CASE("self force vanishes for hyperbolic motion") {
  const double g = 0.2;  // proper acceleration
  auto traj = [&](double t, Vec3& r, Vec3& v, Vec3& a) {
    const double s = std::sqrt(1.0 + g * g * t * t);
    r = Vec3((s - 1.0) / g, 0.0, 0.0);
    v = Vec3(g * t / s, 0.0, 0.0);
    a = Vec3(g / (s * s * s), 0.0, 0.0);
  };
  const Worldline w = Worldline::from_function(traj, -30.0, 30.0, 0.005);
  const FourVector f = self_minus_force_at_time(w, 1.0, 0.7);
  CHECK(f.cwiseAbs().maxCoeff() < 1e-7 * g);
}

TEST_CASE("point-split self force matches the ALD force on a circle") {
  const double v = 0.3, R = 10.0, om = v / R;
  auto traj = [&](double t, Vec3& r, Vec3& vel, Vec3& a) {
    r = Vec3(R * std::cos(om * t), R * std::sin(om * t), 0.0);
    vel = Vec3(-v * std::sin(om * t), v * std::cos(om * t), 0.0);
    a = Vec3(-v * om * std::cos(om * t), -v * om * std::sin(om * t), 0.0);
  };
  const Worldline w = Worldline::from_function(traj, -60.0, 60.0, 0.005);
  const double gam = 1.0 / std::sqrt(1.0 - v * v);
  Vec3 r, vel, a;
  traj(0.0, r, vel, a);
  const FourVector u = make_four(gam, Vec3(gam * vel));
  const FourVector adot = make_four(0.0, Vec3(-std::pow(gam, 3) * om * om * vel));
  const double aa = -std::pow(gam * gam * v * om, 2);
  const FourVector expected = 2.0 / 3.0 / (4 * kPi) * (adot + aa * u);
  const FourVector got = self_minus_force_at_time(w, 1.0, 0.0);
  CHECK((got - expected).cwiseAbs().maxCoeff() / expected.cwiseAbs().maxCoeff() < 1e-3);
}
