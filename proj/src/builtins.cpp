#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>

#include "mcced/harness.hpp"
#include "mcced/symmetry.hpp"

namespace mcced {

namespace {

// Circular orbit of two opposite unit charges of mass 10 at separation 1:
// v² = r e² / (4π d² m) with r = 1/2.
constexpr const char* kInspiral = R"(scenario:
  name: inspiral-pair
  description: Opposite charges on a near-circular orbit; p = +1 radiation damping shrinks the orbit
particles:
  - {charge: 1, mass: 10, position: [-0.5, 0, 0], velocity: [0, -0.063078313050504, 0]}
  - {charge: -1, mass: 10, position: [0.5, 0, 0], velocity: [0, 0.063078313050504, 0]}
topology: {mode: mc-ced, p: 1}
integrator: {method: nbody-retarded, dt: 0.05, t_end: 250}
output: {stride: 10, asymptotic_window: 50}
)";

constexpr const char* kOutspiral = R"(scenario:
  name: outspiral-advanced
  description: The inspiral data taken as the final state of a p = -1 run; the orbit grows toward t = 0
particles:
  - {charge: 1, mass: 10, position: [-0.5, 0, 0], velocity: [0, -0.063078313050504, 0]}
  - {charge: -1, mass: 10, position: [0.5, 0, 0], velocity: [0, 0.063078313050504, 0]}
topology: {mode: mc-ced, p: -1}
integrator: {method: nbody-advanced, dt: 0.05, t_end: 250}
output: {stride: 10, asymptotic_window: 50}
)";

const std::vector<BuiltinScenario>& registry() {
  static const std::vector<BuiltinScenario> list = {
      {"static-pair", "Two like charges released from rest; Coulomb repulsion",
       R"(scenario:
  name: static-pair
  description: Two like charges released from rest; Coulomb repulsion
particles:
  - {charge: 1, mass: 1000, position: [-0.5, 0, 0]}
  - {charge: 1, mass: 1000, position: [0.5, 0, 0]}
topology: {mode: mc-ced, p: 1}
integrator: {method: nbody-retarded, dt: 0.1, t_end: 400}
output: {stride: 10, asymptotic_window: 100}
)"},
      {"coulomb-scatter", "Light charge scattering head-on off a heavy one, p = +1",
       R"(scenario:
  name: coulomb-scatter
  description: Light charge scattering head-on off a heavy one, p = +1
particles:
  - {charge: 1, mass: 1, position: [-15, 0, 0], velocity: [0.3, 0, 0]}
  - {charge: 1, mass: 1000, position: [15, 0, 0]}
topology: {mode: mc-ced, p: 1}
integrator: {method: nbody-retarded, dt: 0.02, t_end: 211}
output: {stride: 10, asymptotic_window: 50}
)"},
      {"circular-B", "Gyration in a uniform magnetic field with Landau-Lifshitz damping",
       R"(scenario:
  name: circular-B
  description: Gyration in a uniform magnetic field with Landau-Lifshitz damping
particles:
  - {charge: 1, mass: 1, velocity: [0, 0.5, 0]}
topology: {mode: ced, p: 1}
external: {kind: uniform-magnetic, amplitude: 1, direction: [0, 0, 1]}
integrator: {method: landau-lifshitz, dt: 0.005, t_end: 20}
output: {stride: 10, asymptotic_window: 2}
)"},
      {"step-force", "Integro-differential Lorentz-Dirac response to a switched uniform field",
       R"(scenario:
  name: step-force
  description: Integro-differential Lorentz-Dirac response to a switched uniform field
particles:
  - {charge: 1, mass: 1}
topology: {mode: ced, p: 1}
external: {kind: uniform-electric, amplitude: 1e-6, direction: [0, 1, 0], switch_on: 0.5}
integrator: {method: ld-integro, dt: 0.001, t_end: 1}
output: {stride: 1, asymptotic_window: 0.2}
)"},
      {"inspiral-pair", "Opposite charges on a near-circular orbit; p = +1 radiation damping shrinks the orbit",
       kInspiral},
      {"outspiral-advanced",
       "The inspiral data taken as the final state of a p = -1 run; the orbit grows toward t = 0",
       kOutspiral},
      {"runaway-demo", "Local Lorentz-Dirac equation with no force and a nonzero initial acceleration",
       R"(scenario:
  name: runaway-demo
  description: Local Lorentz-Dirac equation with no force and a nonzero initial acceleration
particles:
  - {charge: 1, mass: 1, acceleration: [1e-6, 0, 0]}
topology: {mode: ced, p: 1}
integrator: {method: ld-local, dt: 0.0005, t_end: 0.5}
output: {stride: 1, asymptotic_window: 0.1}
)"},
      {"preacceleration", "Local Lorentz-Dirac equation integrated backward from a terminal acceleration",
       R"(scenario:
  name: preacceleration
  description: Local Lorentz-Dirac equation integrated backward from a terminal acceleration
particles:
  - {charge: 1, mass: 1}
topology: {mode: ced, p: 1}
external: {kind: uniform-electric, amplitude: 1e-6, direction: [0, 1, 0], switch_on: 0.5}
integrator: {method: ld-local, dt: 0.001, t_end: 1, terminal_condition: true}
output: {stride: 1, asymptotic_window: 0.2}
)"},
      {"symmetry-suite", "Parity table, operator involutions and T covariance of a two-body run",
       R"(scenario:
  name: symmetry-suite
  description: Parity table, operator involutions and T covariance of a two-body run
  kind: symmetry-suite
particles:
  - {charge: 1, mass: 1, position: [-6, 0, 0], velocity: [0.3, 0, 0]}
  - {charge: 1, mass: 1000, position: [6, 0, 0]}
topology: {mode: mc-ced, p: 1}
integrator: {method: nbody-retarded, dt: 0.02, t_end: 60}
)"},
      {"algebra-suite", "Exact checks of the measurement-color photon algebra",
       R"(scenario:
  name: algebra-suite
  description: Exact checks of the measurement-color photon algebra
  kind: algebra-suite
)"},
  };
  return list;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

double separation(const TrajectoryRecord& r, std::size_t i) {
  return (spatial(r.particles[0].samples[i].position) - spatial(r.particles[1].samples[i].position))
      .norm();
}

/// Separation averaged over each complete revolution of the relative vector.
std::vector<double> orbit_averages(const TrajectoryRecord& r) {
  std::vector<double> out;
  double angle = 0.0, sum = 0.0, span = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < r.steps(); ++i) {
    const Vec3 d = spatial(r.particles[1].samples[i].position) -
                   spatial(r.particles[0].samples[i].position);
    const double phi = std::atan2(d(1), d(0));
    if (i > 0) {
      double dphi = phi - prev;
      if (dphi > std::numbers::pi) dphi -= 2 * std::numbers::pi;
      if (dphi < -std::numbers::pi) dphi += 2 * std::numbers::pi;
      angle += std::abs(dphi);
      const double dt = r.particles[0].samples[i].t() - r.particles[0].samples[i - 1].t();
      sum += separation(r, i) * dt;
      span += dt;
      if (angle >= 2 * std::numbers::pi) {
        out.push_back(sum / span);
        angle -= 2 * std::numbers::pi;
        sum = span = 0.0;
      }
    }
    prev = phi;
  }
  return out;
}

CheckResult monotone_orbit(const TrajectoryRecord& r, bool shrinking) {
  const std::vector<double> avg = orbit_averages(r);
  CheckResult c{shrinking ? "orbit-averaged separation decreases" : "orbit-averaged separation increases",
                avg.size() >= 2, ""};
  for (std::size_t i = 1; i < avg.size(); ++i)
    c.pass = c.pass && (shrinking ? avg[i] < avg[i - 1] : avg[i] > avg[i - 1]);
  std::ostringstream os;
  os << avg.size() << " revolutions:";
  for (double a : avg) os << " " << fmt(a);
  c.detail = os.str();
  return c;
}

/// Nonrelativistic separation of two equal masses repelling from rest.
double coulomb_separation_oracle(double e1e2, double mass, double d0, double t_end) {
  const double mu = mass / 2.0;
  const double k = e1e2 * kInvFourPi / mu;
  double r = d0, v = 0.0;
  const int n = 200000;
  const double h = t_end / n;
  auto acc = [&](double x) { return k / (x * x); };
  for (int i = 0; i < n; ++i) {
    const double k1r = v, k1v = acc(r);
    const double k2r = v + 0.5 * h * k1v, k2v = acc(r + 0.5 * h * k1r);
    const double k3r = v + 0.5 * h * k2v, k3v = acc(r + 0.5 * h * k2r);
    const double k4r = v + h * k3v, k4v = acc(r + h * k3r);
    r += h / 6 * (k1r + 2 * k2r + 2 * k3r + k4r);
    v += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
  }
  return r;
}

/// Max relative deviation from (F/m) e^{(t−t₁)/τ₀} on [t₁ − 5τ₀, t₁).
double preacceleration_error(const Scenario& s, const TrajectoryRecord& r) {
  const Particle& p = s.particles[0];
  const double t0 = tau0(p.charge, p.mass);
  const double t1 = s.external.switch_on;
  const double a_inf = p.charge * s.external.amplitude / p.mass;
  const Vec3 dir = s.external.direction;
  double worst = 0.0;
  for (const RecordSample& x : r.particles[0].samples) {
    const double t = x.t();
    if (t < t1 - 5 * t0 || t >= t1) continue;
    const double expected = a_inf * std::exp((t - t1) / t0);
    worst = std::max(worst, std::abs(spatial(x.acceleration).dot(dir) - expected) / expected);
  }
  return worst;
}

}  // namespace

const std::vector<BuiltinScenario>& builtin_scenarios() { return registry(); }

ScenarioConfig load_scenario(const std::string& name_or_path) {
  for (const BuiltinScenario& b : registry())
    if (b.name == name_or_path) return parse_scenario_text(b.yaml, "builtin:" + b.name);
  if (!std::filesystem::exists(name_or_path)) {
    std::string names;
    for (const BuiltinScenario& b : registry()) names += (names.empty() ? "" : ", ") + b.name;
    fail(ErrorCode::usage, "'" + name_or_path + "' is neither a file nor a built-in scenario (" +
                               names + ")");
  }
  return parse_scenario(name_or_path);
}

RunProducts simulate(const ScenarioConfig& cfg) {
  if (cfg.kind != RunKind::trajectory)
    fail(ErrorCode::usage, std::string("simulate: ") + to_string(cfg.kind) + " has no trajectory");
  const Scenario& s = cfg.scenario;
  RunProducts out;
  RunawayReport runaway;
  ConvergenceReport conv;
  out.record = integrate(s, &runaway, &conv);
  if (s.integrator.method == IntegratorMethod::ld_local) out.runaway = runaway;
  if (s.integrator.method == IntegratorMethod::ld_integro) out.convergence = conv;
  out.ledger = energy_ledger(out.record);
  const double window =
      cfg.output.asymptotic_window > 0 ? cfg.output.asymptotic_window : s.integrator.t_end / 10;
  out.asymptotic = asymptotic_check(out.record, window);
  return out;
}

std::vector<CheckResult> trajectory_checks(const ScenarioConfig& cfg, const RunProducts& run) {
  const Scenario& s = cfg.scenario;
  const TrajectoryRecord& r = run.record;
  const EnergyLedger& L = run.ledger;
  std::vector<CheckResult> out;
  const std::string& name = s.name;

  if (name == "static-pair") {
    const double rel = std::abs(L.closure_residual) / std::abs(L.delta_kinetic());
    out.push_back({"ledger closure < 1e-3 of |dKE|", rel < 1e-3,
                   "closure " + fmt(L.closure_residual) + " relative " + fmt(rel)});
    out.push_back({"repulsion gains kinetic energy", L.delta_kinetic() > 0,
                   "dKE " + fmt(L.delta_kinetic())});
    const double d0 = (s.particles[1].position - s.particles[0].position).norm();
    const double oracle = coulomb_separation_oracle(s.particles[0].charge * s.particles[1].charge,
                                                    s.particles[0].mass, d0, s.integrator.t_end);
    const double got = separation(r, r.steps() - 1);
    const double dev = std::abs(got - oracle) / oracle;
    out.push_back({"final separation matches nonrelativistic two-body oracle within 1e-3",
                   dev < 1e-3, "separation " + fmt(got) + " oracle " + fmt(oracle)});
  } else if (name == "coulomb-scatter") {
    out.push_back({"p = +1 scatter loses kinetic energy", L.delta_kinetic() < 0,
                   "dKE " + fmt(L.delta_kinetic())});
    const double rel = std::abs(L.delta_kinetic() + L.radiated + L.delta_potential()) / L.radiated;
    out.push_back({"ledger closure <= 5% of E_rad", rel <= 0.05, "relative " + fmt(rel)});
    const MotionResidual mr = motion_residual(apply_symmetry(s, SymmetryOp::T), time_reversed(r));
    out.push_back({"time-reversed trajectory satisfies p = -1 equations",
                   mr.max_relative <= 10 * s.integrator.tolerance,
                   "residual " + fmt(mr.max_relative)});
  } else if (name == "circular-B") {
    bool falling = true;
    const ParticleTrack& tr = r.particles[0];
    for (std::size_t i = 1; i < tr.samples.size(); ++i)
      falling = falling && tr.samples[i].velocity(0) < tr.samples[i - 1].velocity(0);
    out.push_back({"energy decreases monotonically", falling,
                   "gamma " + fmt(tr.samples.front().velocity(0)) + " -> " +
                       fmt(tr.samples.back().velocity(0))});
    const double rel = std::abs(L.closure_residual) / L.radiated;
    out.push_back({"ledger closure <= 1% of E_rad", rel <= 0.01, "relative " + fmt(rel)});
  } else if (name == "step-force" || name == "preacceleration") {
    const double err = preacceleration_error(s, r);
    out.push_back({"preacceleration matches (F/m) exp((t - t1)/tau0) within 1e-4", err <= 1e-4,
                   "max relative error " + fmt(err)});
    if (run.convergence)
      out.push_back({"waveform iteration converged", run.convergence->converged,
                     std::to_string(run.convergence->iterations) + " iterations"});
  } else if (name == "inspiral-pair") {
    out.push_back(monotone_orbit(r, true));
  } else if (name == "outspiral-advanced") {
    out.push_back(monotone_orbit(r, false));
    out.push_back({"run ends on the declared data at t = 0",
                   std::abs(r.particles[0].samples.back().t()) < 1e-12,
                   "t_last " + fmt(r.particles[0].samples.back().t())});
  } else if (name == "runaway-demo") {
    const RunawayReport& rr = *run.runaway;
    const double rel = std::abs(rr.growth_rate - rr.expected_rate) / rr.expected_rate;
    out.push_back({"runaway detected", rr.runaway, rr.detail});
    out.push_back({"fitted growth rate within 1% of 1/tau0", rel <= 0.01, "relative " + fmt(rel)});
    out.push_back({"asymptotic check fails", !run.asymptotic.pass, run.asymptotic.detail});
  } else {
    out.push_back({"asymptotic check", run.asymptotic.pass, run.asymptotic.detail});
    if (run.convergence)
      out.push_back({"waveform iteration converged", run.convergence->converged,
                     std::to_string(run.convergence->iterations) + " iterations"});
  }
  return out;
}

}  // namespace mcced
