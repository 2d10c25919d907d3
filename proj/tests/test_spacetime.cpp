#include <doctest.h>

#include <random>

#include "mcced/spacetime.hpp"

using namespace mcced;

TEST_CASE("minkowski product is boost invariant") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const FourVector a(d(rng), d(rng), d(rng), d(rng));
    const FourVector b(d(rng), d(rng), d(rng), d(rng));
    Vec3 v(d(rng), d(rng), d(rng));
    v *= 0.95 / v.norm() * std::abs(d(rng));
    const double before = minkowski_dot(a, b);
    const double after = minkowski_dot(boost(v, a), boost(v, b));
    CHECK(after == doctest::Approx(before).epsilon(1e-12));
  }
}

TEST_CASE("boost inverse and rest frame") {
  const Vec3 v(0.3, -0.4, 0.5);
  const Eigen::Matrix4d L = boost_matrix(v);
  const Eigen::Matrix4d Li = boost_matrix(Vec3(-v));
  CHECK((L * Li - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() < 1e-14);
  const FourVector u = four_velocity(v);
  const FourVector rest = L * u;
  CHECK(rest(0) == doctest::Approx(1.0));
  CHECK(spatial(rest).norm() < 1e-14);
  CHECK_THROWS_AS(boost_matrix(Vec3(1.0, 0.0, 0.0)), Error);
}

TEST_CASE("four-velocity normalization") {
  const FourVector u = four_velocity(Vec3(0.1, 0.2, -0.6));
  CHECK(minkowski_dot(u, u) == doctest::Approx(1.0).epsilon(1e-15));
  const FourVector w = four_velocity_from_spatial(Vec3(3.0, -1.0, 2.0));
  CHECK(minkowski_dot(w, w) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("hermite interpolation is exact for cubic trajectories") {
  auto traj = [](double t, Vec3& r, Vec3& v, Vec3& a) {
    r = Vec3(0.01 * t * t * t - 0.02 * t, 0.03 * t * t, 1.0);
    v = Vec3(0.03 * t * t - 0.02, 0.06 * t, 0.0);
    a = Vec3(0.06 * t, 0.06, 0.0);
  };
  const Worldline w = Worldline::from_function(traj, -2.0, 2.0, 0.5);
  for (double t : {-1.9, -0.77, 0.1, 0.333, 1.49}) {
    Vec3 r, v, a, re, ve, ae;
    w.coordinate_state(t, r, v, a);
    traj(t, re, ve, ae);
    CHECK((r - re).norm() < 1e-14);
    CHECK((v - ve).norm() < 1e-14);
  }
}

TEST_CASE("inertial extension outside the sampled range") {
  const Worldline w = Worldline::inertial(Vec3(1.0, 2.0, 3.0), Vec3(0.5, 0.0, 0.0));
  const WorldlineState s = w.state_at(-10.0);
  CHECK(s.position(1) == doctest::Approx(-4.0));
  CHECK(s.acceleration.norm() == 0.0);
}

TEST_CASE("worldline time reversal is an involution") {
  auto traj = [](double t, Vec3& r, Vec3& v, Vec3& a) {
    r = Vec3(std::cos(0.2 * t), std::sin(0.2 * t), 0.0);
    v = Vec3(-0.2 * std::sin(0.2 * t), 0.2 * std::cos(0.2 * t), 0.0);
    a = Vec3(-0.04 * std::cos(0.2 * t), -0.04 * std::sin(0.2 * t), 0.0);
  };
  const Worldline w = Worldline::from_function(traj, -5.0, 5.0, 0.1);
  const Worldline back = w.time_reversed().time_reversed();
  REQUIRE(back.size() == w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK((back.samples()[i].position - w.samples()[i].position).norm() < 1e-14);
    CHECK((back.samples()[i].velocity - w.samples()[i].velocity).norm() < 1e-14);
  }
  Vec3 r, v, a;
  w.time_reversed().coordinate_state(-1.3, r, v, a);
  Vec3 r0, v0, a0;
  traj(1.3, r0, v0, a0);
  CHECK((r - r0).norm() < 1e-8);
  CHECK((v + v0).norm() < 1e-8);
}

TEST_CASE("external field envelope and validation") {
  ExternalField f;
  f.kind = ExternalField::Kind::uniform_electric;
  f.amplitude = 2.0;
  f.switch_on = 1.0;
  CHECK(f.envelope(0.5) == 0.0);
  CHECK(f.envelope(1.0, true) == 1.0);
  CHECK(f.envelope(1.0, false) == 0.0);
  CHECK(f.switch_times() == std::vector<double>{1.0});
  f.ramp = 2.0;
  CHECK(f.envelope(2.0) == doctest::Approx(0.5));
  CHECK(f.switch_times().empty());

  ExternalField w;
  w.kind = ExternalField::Kind::plane_wave;
  w.direction = Vec3(0.0, 0.0, 1.0);
  w.polarization = Vec3(0.0, 0.6, 0.8);
  CHECK_THROWS_AS(w.validate(), Error);
  w.polarization = Vec3(1.0, 0.0, 0.0);
  CHECK_NOTHROW(w.validate());
  CHECK_THROWS_AS(time_reversed(f), Error);
}
