#include "mcced/acceptance.hpp"

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

#include "mcced/coupling.hpp"
#include "mcced/symmetry.hpp"

namespace fs = std::filesystem;

namespace mcced {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

CheckResult all_of(const std::string& name, const std::vector<CheckResult>& parts) {
  CheckResult out{name, !parts.empty(), ""};
  for (const CheckResult& c : parts) {
    out.pass = out.pass && c.pass;
    if (!out.detail.empty()) out.detail += "; ";
    out.detail += (c.pass ? "" : "FAILED ") + c.name + ": " + c.detail;
  }
  return out;
}

CheckResult coulomb_limit() {
  Scenario s;
  Particle far, src;
  far.position = Vec3(0.0, 0.0, -500.0);
  src.charge = 1.5;
  s.particles = {far, src};
  s.topology.p = 0.5;
  const Vec3 dirs[] = {Vec3(1, 0, 0), Vec3(0, 1, 1).normalized(), Vec3(-1, 2, -0.5).normalized()};
  double worst = 0.0, worst_b = 0.0;
  for (double r : {1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0})
    for (const Vec3& d : dirs) {
      const FieldTensor F = observed_field(s, 0, make_four(3.0, Vec3(r * d)));
      const Vec3 expected = src.charge / (4.0 * std::numbers::pi * r * r) * d;
      worst = std::max(worst, (F.E - expected).norm() / expected.norm());
      worst_b = std::max(worst_b, F.B.norm() / expected.norm());
    }
  return {"observed field of a static charge is e/(4 pi r^2), r in [1, 100]",
          worst <= 1e-10 && worst_b <= 1e-10,
          "max relative error E " + fmt(worst) + ", |B|/|E| " + fmt(worst_b)};
}

/// Rest-frame Coulomb field carried into the lab by the inverse boost.
FieldTensor boosted_coulomb(double charge, const Vec3& v, const FourVector& x) {
  const Eigen::Matrix4d to_rest = boost_matrix(v);
  const Eigen::Matrix4d to_lab = boost_matrix(Vec3(-v));
  const FourVector xr = to_rest * x;
  const Vec3 r = spatial(xr);
  const Vec3 E_rest = charge / (4.0 * std::numbers::pi * std::pow(r.norm(), 3)) * r;
  Eigen::Matrix4d Fr = Eigen::Matrix4d::Zero();  // F^{μν}
  for (int i = 0; i < 3; ++i) {
    Fr(i + 1, 0) = E_rest(i);
    Fr(0, i + 1) = -E_rest(i);
  }
  const Eigen::Matrix4d F = to_lab * Fr * to_lab.transpose();
  FieldTensor out;
  for (int i = 0; i < 3; ++i) out.E(i) = F(i + 1, 0);
  out.B = Vec3(-F(2, 3), F(1, 3), -F(1, 2));
  return out;
}

CheckResult boosted_coulomb_check() {
  double worst = 0.0;
  const FourVector events[] = {make_four(0.0, Vec3(3.0, 1.0, 0.0)), make_four(2.0, Vec3(-1.0, 4.0, 2.0)),
                               make_four(-5.0, Vec3(0.5, -0.5, 7.0))};
  for (double speed : {0.3, 0.6, 0.9}) {
    const Vec3 v = speed * Vec3(1.0, 1.0, 0.5).normalized();
    const Worldline w = Worldline::inertial(Vec3::Zero(), v);
    for (const FourVector& x : events)
      for (LightConeBranch b : {LightConeBranch::retarded, LightConeBranch::advanced}) {
        const FieldTensor got = lw_field(w, 1.0, x, b);
        const FieldTensor expected = boosted_coulomb(1.0, v, x);
        worst = std::max(worst, max_abs_diff(got, expected) / expected.max_abs());
      }
  }
  return {"uniformly moving charge equals boosted static field, v in {0.3, 0.6, 0.9}", worst <= 1e-8,
          "max relative deviation " + fmt(worst)};
}

CheckResult static_minus_field() {
  Scenario s;
  Particle a, b;
  a.position = Vec3(-1.0, 0.0, 0.0);
  b.position = Vec3(2.0, 0.5, 0.0);
  b.charge = -2.0;
  s.particles = {a, b};
  double worst = 0.0;
  for (const FourVector& x : {make_four(0.0, Vec3(0.0, 3.0, 0.0)), make_four(5.0, Vec3(10.0, -2.0, 1.0)),
                              make_four(-3.0, Vec3(0.1, 0.1, 0.1))}) {
    worst = std::max(worst, tcrf_field(s, x).max_abs());
    for (std::size_t k = 0; k < 2; ++k)
      worst = std::max(worst, field_half_difference(s.worldline(k), s.particles[k].charge, x).max_abs());
  }
  for (double t : {-2.0, 0.0, 7.5})
    worst = std::max(worst, minus_field_on_worldline(s.worldline(0), 1.0, t).max_abs());
  return {"minus field of static sources vanishes", worst <= 1e-12, "max |F(-)| " + fmt(worst)};
}

CheckResult self_force_oracle() {
  const double v = 0.3, R = 10.0, w = v / R, e = 1.0;
  auto traj = [&](double t, Vec3& r, Vec3& vel, Vec3& acc) {
    r = Vec3(R * std::cos(w * t), R * std::sin(w * t), 0.0);
    vel = Vec3(-v * std::sin(w * t), v * std::cos(w * t), 0.0);
    acc = Vec3(-v * w * std::cos(w * t), -v * w * std::sin(w * t), 0.0);
  };
  const Worldline line = Worldline::from_function(traj, -60.0, 60.0, 0.005);
  const double g = 1.0 / std::sqrt(1.0 - v * v);
  double worst = 0.0;
  for (double t : {-10.0, 0.0, 3.7, 20.0}) {
    Vec3 r, vel, acc;
    traj(t, r, vel, acc);
    const Vec3 jerk = -w * w * vel;
    const FourVector u = make_four(g, Vec3(g * vel));
    const FourVector adot = make_four(0.0, Vec3(g * g * g * jerk));
    const double aa = -std::pow(g * g * v * w, 2);
    const FourVector expected = (2.0 / 3.0) * e * e / (4.0 * std::numbers::pi) * (adot + aa * u);
    const FourVector got = self_minus_force_at_time(line, e, t);
    worst = std::max(worst, (got - expected).cwiseAbs().maxCoeff() / expected.cwiseAbs().maxCoeff());
  }
  return {"point-split self force on circular motion equals the ALD force (v = 0.3, R = 10)",
          worst <= 1e-3, "max relative deviation " + fmt(worst)};
}

Scenario single(double charge, double mass) {
  Scenario s;
  Particle p;
  p.charge = charge;
  p.mass = mass;
  s.particles = {p};
  s.topology.mode = CouplingMode::ced;
  return s;
}

CheckResult kernel_normalization() {
  Scenario s = single(1.0, 1.0);
  const double t0 = tau0(1.0, 1.0);
  s.external.kind = ExternalField::Kind::uniform_electric;
  s.external.amplitude = 1e-6;
  s.external.direction = Vec3(0.0, 0.0, 1.0);
  s.integrator.method = IntegratorMethod::ld_integro;
  s.integrator.dt = t0 / 20;
  s.integrator.t_end = 10 * t0;
  ConvergenceReport rep;
  const TrajectoryRecord r = integrate_ld_integro(s, &rep);
  const double expected = 1e-6;
  double worst = 0.0;
  for (const RecordSample& x : r.particles[0].samples) {
    const double a = std::sqrt(-minkowski_dot(x.acceleration, x.acceleration));
    worst = std::max(worst, std::abs(a - expected) / expected);
  }
  return {"eternal constant force gives a = F/m", worst <= 1e-9,
          "max relative error " + fmt(worst) + " over " + std::to_string(r.steps()) + " nodes, " +
              std::to_string(rep.iterations) + " iterations"};
}

CheckResult builtin_checks(const std::string& name, const std::string& title) {
  const ScenarioConfig cfg = load_scenario(name);
  return all_of(title, trajectory_checks(cfg, simulate(cfg)));
}

CheckResult runaway_check() {
  std::vector<CheckResult> parts;
  ScenarioConfig cfg = load_scenario("runaway-demo");
  const RunProducts run = simulate(cfg);
  for (const CheckResult& c : trajectory_checks(cfg, run)) parts.push_back(c);

  Scenario s = cfg.scenario;
  const double t0 = tau0(s.particles[0].charge, s.particles[0].mass);
  const double a0 = s.particles[0].acceleration.norm();
  s.integrator.method = IntegratorMethod::ld_integro;
  s.integrator.dt = t0 / 20;
  s.integrator.t_end = 40 * t0;
  const TrajectoryRecord r = integrate_ld_integro(s);
  double late = 0.0;
  for (const RecordSample& x : r.particles[0].samples)
    if (x.t() >= 30 * t0) late = std::max(late, spatial(x.acceleration).norm());
  parts.push_back({"integro solution stays bounded", late <= a0 * 1e-6,
                   "max |a| after 30 tau0 = " + fmt(late)});
  return all_of("local LD runs away at 1/tau0; integro solution stays bounded", parts);
}

CheckResult arrow_of_time() {
  const ScenarioConfig cfg = load_scenario("coulomb-scatter");
  const Scenario& s = cfg.scenario;
  const TrajectoryRecord fwd = integrate(s);
  const EnergyLedger L = energy_ledger(fwd);
  const EnergyLedger La = energy_ledger(integrate(apply_symmetry(s, SymmetryOp::T)));
  const double rel = std::abs(L.delta_kinetic() + L.radiated + L.delta_potential()) / L.radiated;
  return all_of("p = +1 scatter loses kinetic energy; T-mapped p = -1 run gains it",
                {{"p = +1 dKE < 0", L.delta_kinetic() < 0, "dKE " + fmt(L.delta_kinetic())},
                 {"closure <= 5% of E_rad", rel <= 0.05,
                  "E_rad " + fmt(L.radiated) + ", relative closure " + fmt(rel)},
                 {"p = -1 dKE > 0", La.delta_kinetic() > 0, "dKE " + fmt(La.delta_kinetic())}});
}

CheckResult t_invariance() {
  const ScenarioConfig cfg = load_scenario("coulomb-scatter");
  const Scenario& s = cfg.scenario;
  const TrajectoryRecord fwd = integrate(s);
  const MotionResidual mr = motion_residual(apply_symmetry(s, SymmetryOp::T), time_reversed(fwd));
  return {"time-reversed p = +1 trajectory satisfies the p = -1 equations",
          mr.max_relative <= 10 * s.integrator.tolerance,
          "residual " + fmt(mr.max_relative) + ", bound " + fmt(10 * s.integrator.tolerance)};
}

CheckResult threshold_check() {
  const Regime a = classical_threshold(1e-3, 1e-5);
  const Regime b = classical_threshold(1e-6, 1e-5);
  return {"classical_threshold regimes", a == Regime::pointer_basis_classical &&
                                              b == Regime::quantum_superposition,
          std::string("(1e-3, 1e-5): ") + to_string(a) + "; (1e-6, 1e-5): " + to_string(b)};
}

}  // namespace

CheckResult determinism_check() {
  const fs::path root =
      fs::temp_directory_path() / ("mcced-determinism-" + std::to_string(::getpid()));
  std::vector<std::string> diffs;
  double slowest = 0.0;
  std::string slowest_name;
  for (const BuiltinScenario& b : builtin_scenarios()) {
    const ScenarioConfig cfg = load_scenario(b.name);
    nlohmann::ordered_json m[2];
    for (int i = 0; i < 2; ++i) {
      const fs::path dir = root / b.name / (i ? "b" : "a");
      fs::remove_all(dir);
      const auto t = std::chrono::steady_clock::now();
      m[i] = run(cfg, {dir, 1}).manifest;
      const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
      if (sec > slowest) {
        slowest = sec;
        slowest_name = b.name;
      }
      m[i].erase("wall_time");
    }
    if (m[0] != m[1]) diffs.push_back(b.name);
    if (m[0]["outputs"].empty() && m[0]["status"] == "ok") diffs.push_back(b.name + " (no outputs)");
  }
  fs::remove_all(root);
  std::string detail = std::to_string(builtin_scenarios().size()) +
                       " built-ins run twice; output hashes and manifests (less wall times) " +
                       (diffs.empty() ? "identical" : "differ");
  for (const std::string& d : diffs) detail += " " + d;
  detail += "; slowest run " + slowest_name + " " + fmt(slowest) + " s";
  return {"two runs of every built-in produce identical bytes", diffs.empty(), detail};
}

const std::vector<Criterion>& acceptance_criteria() {
  static const std::vector<Criterion> list = {
      {1, "fields", "Coulomb limit", coulomb_limit},
      {2, "fields", "Boosted Coulomb", boosted_coulomb_check},
      {3, "fields", "Static minus field", static_minus_field},
      {4, "fields", "Self-force oracle", self_force_oracle},
      {5, "dynamics", "Kernel normalization", kernel_normalization},
      {6, "dynamics", "Preacceleration",
       [] { return builtin_checks("step-force", "integro solution preaccelerates as exp((t - t1)/tau0)"); }},
      {7, "dynamics", "Runaway", runaway_check},
      {8, "dynamics", "Arrow-of-time stability contrast", arrow_of_time},
      {9, "dynamics", "Generalized T invariance", t_invariance},
      {10, "symmetry", "Parity table", [] { return all_of("measured parities", parity_table()); }},
      {11, "algebra", "Photon algebra", [] { return all_of("exact algebra checks", algebra_suite()); }},
      {12, "dynamics", "Threshold diagnostic", threshold_check},
      {13, "determinism", "Determinism", determinism_check},
  };
  return list;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"fields", "dynamics", "symmetry", "algebra", "all"};
  return names;
}

std::vector<CriterionOutcome> run_suite(const std::string& suite, std::ostream& out) {
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), suite) == names.end())
    fail(ErrorCode::usage, "unknown suite '" + suite + "' (fields, dynamics, symmetry, algebra, all)");
  std::vector<CriterionOutcome> results;
  for (const Criterion& c : acceptance_criteria()) {
    if (suite != "all" && c.suite != suite) continue;
    const auto t = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = c.run();
    } catch (const Error& e) {
      r = {c.title, false, std::string(to_string(e.code())) + " error: " + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
    out << (r.pass ? "PASS" : "FAIL") << "  [" << c.id << "] " << c.title << ": " << r.name
        << "  (" << r.detail << ")  " << fmt(sec) << " s" << std::endl;
    results.push_back({c.id, r, sec});
  }
  return results;
}

}  // namespace mcced
