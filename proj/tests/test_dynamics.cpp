#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mcced/dynamics.hpp"
#include "mcced/harness.hpp"

using namespace mcced;

namespace {

Scenario gyration(IntegratorMethod m, double dt) {
  Scenario s;
  Particle p;
  p.velocity = Vec3(0.0, 0.5, 0.0);
  s.particles = {p};
  s.topology.mode = CouplingMode::ced;
  s.external.kind = ExternalField::Kind::uniform_magnetic;
  s.external.amplitude = 1.0;
  s.external.direction = Vec3(0.0, 0.0, 1.0);
  s.integrator.method = m;
  s.integrator.dt = dt;
  s.integrator.t_end = 6.0;
  return s;
}

double kinetic(const RecordSample& s) { return s.velocity(0) - 1.0; }

}  // namespace

TEST_CASE("tau0 and Larmor constants") {
  CHECK(tau0(1.0, 1.0) * 4.0 * std::numbers::pi == doctest::Approx(2.0 / 3.0));
  const FourVector u = four_velocity(Vec3(0.3, 0.0, 0.0));
  const FourVector a = make_four(0.0, Vec3(0.0, 0.2, 0.0));
  CHECK(larmor_power(u, a, 1.0) == doctest::Approx(2.0 / 3.0 / (4 * std::numbers::pi) * 0.04));
  CHECK(larmor_power(u, a, 1.0) >= 0.0);
}

TEST_CASE("Landau-Lifshitz agrees with the integro solution in a magnetic field") {
  const TrajectoryRecord ll = integrate(gyration(IntegratorMethod::landau_lifshitz, 0.005));
  ConvergenceReport rep;
  const TrajectoryRecord ig =
      integrate_ld_integro(gyration(IntegratorMethod::ld_integro, 0.005), &rep);
  CHECK(rep.converged);
  const double lost_ll = kinetic(ll.particles[0].samples.front()) - kinetic(ll.particles[0].samples.back());
  const double lost_ig = kinetic(ig.particles[0].samples.front()) - kinetic(ig.particles[0].samples.back());
  CHECK(lost_ll > 0.0);
  CHECK(std::abs(lost_ll - lost_ig) / lost_ig < 0.02);
}

TEST_CASE("energy ledger of a magnetic gyration closes") {
  const TrajectoryRecord r = integrate(gyration(IntegratorMethod::landau_lifshitz, 0.005));
  const EnergyLedger L = energy_ledger(r);
  CHECK(L.external_work == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(L.closure_residual) < 1e-2 * L.radiated);
}

TEST_CASE("preacceleration of the integro solution") {
  Scenario s;
  s.particles = {Particle{}};
  s.topology.mode = CouplingMode::ced;
  const double t0 = tau0(1.0, 1.0);
  s.external.kind = ExternalField::Kind::uniform_electric;
  s.external.amplitude = 1e-6;
  s.external.switch_on = 10 * t0;
  s.integrator.method = IntegratorMethod::ld_integro;
  s.integrator.dt = t0 / 50;
  s.integrator.t_end = 20 * t0;
  const TrajectoryRecord r = integrate(s);
  for (const RecordSample& x : r.particles[0].samples) {
    if (x.t() < 5 * t0 || x.t() >= 10 * t0) continue;
    const double expected = 1e-6 * std::exp((x.t() - 10 * t0) / t0);
    CHECK(std::abs(x.acceleration(1) - expected) / expected < 1e-6);
  }
  // After the switch the acceleration settles at F/m.
  CHECK(r.particles[0].samples.back().acceleration(1) == doctest::Approx(1e-6).epsilon(1e-6));
}

TEST_CASE("local equation runs away at rate 1/tau0") {
  Scenario s;
  Particle p;
  p.acceleration = Vec3(1e-6, 0.0, 0.0);
  s.particles = {p};
  s.topology.mode = CouplingMode::ced;
  const double t0 = tau0(1.0, 1.0);
  s.integrator.method = IntegratorMethod::ld_local;
  s.integrator.dt = t0 / 100;
  s.integrator.t_end = 10 * t0;
  RunawayReport rep;
  const TrajectoryRecord r = integrate(s, &rep);
  CHECK(rep.runaway);
  CHECK(rep.growth_rate * t0 == doctest::Approx(1.0).epsilon(0.01));
  CHECK_FALSE(asymptotic_check(r, 2 * t0).pass);
}

TEST_CASE("local equation truncates on overflow") {
  Scenario s;
  Particle p;
  p.acceleration = Vec3(1e-3, 0.0, 0.0);
  s.particles = {p};
  s.topology.mode = CouplingMode::ced;
  const double t0 = tau0(1.0, 1.0);
  s.integrator.method = IntegratorMethod::ld_local;
  s.integrator.dt = t0 / 20;
  // Coordinate time outruns the exponential growth unless the horizon is huge.
  s.integrator.t_end = 1e300;
  RunawayReport rep;
  integrate(s, &rep);
  CHECK(rep.truncated);
  CHECK(rep.truncated_at < s.integrator.t_end);
}

TEST_CASE("inspiral separation decreases orbit by orbit") {
  const ScenarioConfig cfg = load_scenario("inspiral-pair");
  const RunProducts run = simulate(cfg);
  for (const CheckResult& c : trajectory_checks(cfg, run)) CHECK_MESSAGE(c.pass, c.name << ": " << c.detail);
}

TEST_CASE("direct and mapped p = -1 solvers agree") {
  Scenario s;
  Particle a, b;
  a.position = Vec3(-3.0, 0.0, 0.0);
  a.velocity = Vec3(0.2, 0.05, 0.0);
  b.position = Vec3(3.0, 0.0, 0.0);
  b.velocity = Vec3(-0.2, 0.0, 0.0);
  s.particles = {a, b};
  s.topology.p = -1.0;
  s.integrator.method = IntegratorMethod::nbody_advanced;
  s.integrator.dt = 0.01;
  s.integrator.t_end = 4.0;
  ConvergenceReport rep;
  const TrajectoryRecord direct = integrate_advanced_nbody_direct(s, &rep);
  CHECK(rep.converged);

  // The mapped solver takes its data as the final state: use the direct run's end.
  Scenario m = s;
  for (std::size_t k = 0; k < 2; ++k) {
    const RecordSample& end = direct.particles[k].samples.back();
    m.particles[k].position = spatial(end.position);
    m.particles[k].velocity = spatial(end.velocity) / end.velocity(0);
  }
  const TrajectoryRecord mapped = integrate_advanced_nbody(m);
  CHECK(mapped.particles[0].samples.back().t() == doctest::Approx(0.0));
  double worst = 0.0;
  for (std::size_t k = 0; k < 2; ++k) {
    const Worldline w = mapped.particles[k].worldline();
    for (const RecordSample& x : direct.particles[k].samples) {
      Vec3 r, v, acc;
      w.coordinate_state(x.t() - s.integrator.t_end, r, v, acc);
      worst = std::max(worst, (spatial(x.position) - r).norm());
    }
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("time-reversed record satisfies the p = -1 equations") {
  Scenario s;
  Particle a, b;
  a.position = Vec3(-4.0, 0.5, 0.0);
  a.velocity = Vec3(0.3, 0.0, 0.0);
  b.position = Vec3(4.0, 0.0, 0.0);
  b.charge = -1.0;
  b.mass = 50.0;
  s.particles = {a, b};
  s.integrator.dt = 0.02;
  s.integrator.t_end = 20.0;
  const TrajectoryRecord r = integrate(s);
  CHECK(motion_residual(s, r).max_relative < 1e-9);
  Scenario adv = s;
  adv.topology.p = -1.0;
  adv.integrator.method = IntegratorMethod::nbody_advanced;
  CHECK(motion_residual(adv, time_reversed(r)).max_relative < 1e-9);
  // The same record is not a p = -1 solution without the reversal.
  CHECK(motion_residual(adv, r).max_relative > 1e-6);
}

TEST_CASE("methods reject the wrong p or particle count") {
  Scenario s;
  s.particles = {Particle{}, Particle{}};
  s.particles[1].position = Vec3(2.0, 0.0, 0.0);
  s.topology.p = -1.0;
  CHECK_THROWS_AS(integrate_retarded_nbody(s), Error);
  s.topology.p = 1.0;
  CHECK_THROWS_AS(integrate_advanced_nbody(s), Error);
  s.integrator.method = IntegratorMethod::ld_integro;
  CHECK_THROWS_AS(integrate(s), Error);
}

TEST_CASE("classical threshold regimes") {
  CHECK(classical_threshold(1e-3, 1e-5) == Regime::pointer_basis_classical);
  CHECK(classical_threshold(1e-6, 1e-5) == Regime::quantum_superposition);
  CHECK(classical_threshold(1e-5, 1e-5) == Regime::intermediate);
  CHECK_THROWS_AS(classical_threshold(0.0, 1e-5), Error);
}
