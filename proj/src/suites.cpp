#include <cmath>
#include <random>
#include <sstream>

#include "mcced/harness.hpp"
#include "mcced/photon_algebra.hpp"
#include "mcced/symmetry.hpp"

namespace mcced {

namespace {

Worldline circular_worldline(double radius, double omega, double phase, double z) {
  auto f = [=](double t, Vec3& r, Vec3& v, Vec3& a) {
    const double th = omega * t + phase;
    r = Vec3(radius * std::cos(th), radius * std::sin(th), z);
    v = Vec3(-radius * omega * std::sin(th), radius * omega * std::cos(th), 0.0);
    a = Vec3(-radius * omega * omega * std::cos(th), -radius * omega * omega * std::sin(th), 0.0);
  };
  return Worldline::from_function(f, -60.0, 60.0, 0.01);
}

/// Two charges on circular orbits (speeds 0.3 and 0.2) with no external field.
Scenario orbiting_pair() {
  Scenario s;
  s.name = "orbiting-pair";
  Particle a, b;
  a.charge = 1.0;
  b.charge = -0.7;
  a.worldline = circular_worldline(1.0, 0.3, 0.0, 0.0);
  b.worldline = circular_worldline(2.0, 0.1, 1.1, 0.4);
  for (Particle* p : {&a, &b}) {
    const WorldlineState st = p->worldline.state_at(0.0);
    p->position = spatial(st.position);
    p->velocity = spatial(st.velocity) / st.velocity(0);
  }
  s.particles = {a, b};
  s.topology.mode = CouplingMode::mc_ced;
  return s;
}

std::vector<FourVector> sample_events() {
  return {make_four(0.2, Vec3(4.0, 1.0, 0.5)), make_four(-0.7, Vec3(-3.0, 2.0, 1.0)),
          make_four(1.3, Vec3(0.5, -4.0, 2.0)), make_four(0.0, Vec3(2.5, 2.5, -1.5))};
}

CheckResult parity_entry(FieldFunctional f, SymmetryOp op, int expected, const Scenario& s) {
  const ParityReport rep = measure_parity(f, op, s, sample_events());
  std::ostringstream name;
  name << to_string(f) << " under " << to_string(op) << " = " << (expected > 0 ? "+1" : "-1");
  return {name.str(), rep.parity && *rep.parity == expected, rep.detail};
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Vec3 random_vec(std::mt19937_64& rng, double scale) {
  return Vec3(uniform(rng, -scale, scale), uniform(rng, -scale, scale), uniform(rng, -scale, scale));
}

Vec3 random_unit(std::mt19937_64& rng) {
  Vec3 v;
  do v = random_vec(rng, 1.0);
  while (v.norm() < 0.1);
  return v.normalized();
}

ExternalField random_field(std::mt19937_64& rng, bool plane_wave_only) {
  ExternalField f;
  const int kind = plane_wave_only ? 4 : static_cast<int>(rng() % 5);
  f.kind = static_cast<ExternalField::Kind>(kind);
  f.amplitude = uniform(rng, -2.0, 2.0);
  f.direction = random_unit(rng);
  f.center = random_vec(rng, 3.0);
  if (f.kind == ExternalField::Kind::plane_wave) {
    Vec3 pol = random_unit(rng);
    pol -= pol.dot(f.direction) * f.direction;
    f.polarization = pol.normalized();
    f.omega = uniform(rng, 0.1, 3.0);
    f.phase = uniform(rng, -3.0, 3.0);
  }
  return f;
}

Scenario random_scenario(std::mt19937_64& rng) {
  Scenario s;
  const int n = 2 + static_cast<int>(rng() % 3);
  for (int i = 0; i < n; ++i) {
    Particle p;
    p.charge = uniform(rng, -2.0, 2.0);
    p.mass = uniform(rng, 0.1, 10.0);
    p.position = random_vec(rng, 10.0);
    p.velocity = random_vec(rng, 0.5);
    p.acceleration = random_vec(rng, 0.1);
    s.particles.push_back(p);
  }
  const double ps[] = {1.0, -1.0, 0.5, -2.0};
  s.topology.p = ps[rng() % 4];
  if (rng() % 2) {
    s.topology.mode = CouplingMode::ced;
    s.topology.free_field = random_field(rng, true);
    s.topology.boundary = static_cast<CedBoundary>(rng() % 3);
  }
  s.external = random_field(rng, false);
  s.integrator.method = s.topology.p > 0 ? IntegratorMethod::nbody_retarded
                                         : IntegratorMethod::nbody_advanced;
  return s;
}

nlohmann::ordered_json snapshot(const Scenario& s) {
  ScenarioConfig c;
  c.scenario = s;
  return to_json(c);
}

bool same(const Scenario& a, const Scenario& b) { return snapshot(a) == snapshot(b); }

}  // namespace

std::vector<CheckResult> parity_table() {
  const Scenario pair = orbiting_pair();
  std::vector<CheckResult> out;
  out.push_back(parity_entry(FieldFunctional::tcrf, SymmetryOp::Tt, -1, pair));
  out.push_back(parity_entry(FieldFunctional::rad_part, SymmetryOp::Tp, -1, pair));
  out.push_back(parity_entry(FieldFunctional::rad_part, SymmetryOp::T, +1, pair));
  out.push_back(parity_entry(FieldFunctional::total, SymmetryOp::C, -1, pair));

  Scenario ced = pair;
  ced.name = "orbiting-pair-ced";
  ced.topology.mode = CouplingMode::ced;
  ced.topology.boundary = CedBoundary::sommerfeld;
  ExternalField wave;
  wave.kind = ExternalField::Kind::plane_wave;
  wave.amplitude = 0.05;
  wave.direction = Vec3(0.0, 0.0, 1.0);
  wave.polarization = Vec3(1.0, 0.0, 0.0);
  wave.omega = 0.8;
  wave.phase = 0.3;
  ced.topology.free_field = wave;
  const CedContrastReport contrast = ced_parity_contrast(ced, sample_events());
  out.push_back({"ced rad_part under Tt maps p -> -p", contrast.maps_to_opposite_p, contrast.detail});
  return out;
}

CheckResult involution_check(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  int bad = 0;
  std::string first;
  for (int i = 0; i < count; ++i) {
    const Scenario s = random_scenario(rng);
    auto note = [&](const std::string& what) {
      if (bad++ == 0) first = "scenario " + std::to_string(i) + ": " + what;
    };
    for (SymmetryOp op : kAllSymmetryOps)
      if (!same(apply_symmetry(apply_symmetry(s, op), op), s))
        note(std::string(to_string(op)) + " is not an involution");
    if (!same(apply_symmetry(apply_symmetry(s, SymmetryOp::Tt), SymmetryOp::Tp),
              apply_symmetry(s, SymmetryOp::T)))
      note("T != Tt Tp");
    const Scenario cpt = apply_symmetry(
        apply_symmetry(apply_symmetry(s, SymmetryOp::T), SymmetryOp::P), SymmetryOp::C);
    if (!same(cpt, apply_symmetry(s, SymmetryOp::CPT))) note("CPT != C P T");
  }
  std::ostringstream os;
  os << count << " random scenarios (seed " << seed << "), " << bad << " failures";
  if (bad) os << "; first: " << first;
  return {"operators are involutions; T = Tt Tp; CPT = C P T", bad == 0, os.str()};
}

std::vector<CheckResult> symmetry_suite(const ScenarioConfig& cfg, std::uint64_t seed) {
  std::vector<CheckResult> out = parity_table();
  out.push_back(involution_check(seed, 100));

  const Scenario& s = cfg.scenario;
  if (s.integrator.method == IntegratorMethod::nbody_retarded && s.size() >= 2) {
    const TrajectoryRecord r = integrate(s);
    Scenario image = apply_symmetry(s, SymmetryOp::T);
    const MotionResidual mr = motion_residual(image, time_reversed(r));
    std::ostringstream os;
    os << "residual " << mr.max_relative << " (particle " << mr.particle << ", sample "
       << mr.sample << ")";
    out.push_back({"time-reversed p = +1 run satisfies the p = -1 equations",
                   mr.max_relative <= 10 * s.integrator.tolerance, os.str()});
  }
  return out;
}

namespace {

using algebra::FockState;
using algebra::Polynomial;
using algebra::Rational;

std::string rstr(const Rational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

}  // namespace

std::vector<CheckResult> algebra_suite() {
  using namespace algebra;
  std::vector<CheckResult> out;
  auto record = [&](const std::string& name, bool ok, const std::string& detail) {
    out.push_back({name, ok, detail});
  };

  bool ok = true;
  std::string bad;
  for (int N = 2; N <= 6; ++N)
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu) {
        const Polynomial c = commutator(build_alpha(N, mu), build_alpha(N, nu, true));
        const Rational expected = mu == nu ? Rational(-metric(mu) * N, N - 1) : Rational(0);
        if (!(c == Polynomial::scalar(expected))) {
          ok = false;
          bad = "N=" + std::to_string(N) + " mu=" + std::to_string(mu) + " nu=" +
                std::to_string(nu) + " got " + c.str();
        }
      }
  record("[alpha_mu, alpha_nu^+] = -eta_mu_nu N/(N-1), N = 2..6", ok, ok ? "exact" : bad);

  // a^(k) = alpha - a^(k)(-) is the radiation operator a_rad(k).
  ok = true;
  for (int N = 2; N <= 6; ++N)
    for (int k = 1; k <= N; ++k)
      for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) {
          const Polynomial c = commutator(build_alpha(N, mu), build_a_rad(N, k, nu, true));
          const Rational expected = mu == nu ? Rational(-metric(mu), N - 1) : Rational(0);
          if (!(c == Polynomial::scalar(expected))) {
            ok = false;
            bad = "N=" + std::to_string(N) + " k=" + std::to_string(k) + " got " + c.str();
          }
        }
  record("[alpha_mu, a_rad(k)_nu^+] = -eta_mu_nu/(N-1), N = 2..6", ok, ok ? "exact" : bad);

  ok = true;
  for (int N = 2; N <= 6; ++N)
    for (int k = 1; k <= N; ++k)
      for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) {
          const Polynomial c = commutator(build_alpha(N, mu), base_operator(N, k, nu, true));
          ok = ok && c == Polynomial::scalar(mu == nu ? Rational(-metric(mu)) : Rational(0));
        }
  record("[alpha_mu, a_nu^(k)(-)+] = -eta_mu_nu, N = 2..6", ok, "exact");

  ok = true;
  for (int N = 2; N <= 6; ++N)
    for (int k = 1; k <= N; ++k)
      for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu)
          ok = ok && commutator(base_operator(N, k, mu), base_operator(N, k, nu, true)).is_zero();
  record("same-color bracket [a_mu^(k), a_nu^(k)+] = 0", ok, "N = 2..6, all k, mu, nu");

  ok = true;
  for (int N = 2; N <= 6; ++N) ok = ok && apply_to_vacuum(build_h_ph(N, 1)).is_zero();
  record("H_ph |0> = 0", ok, "N = 2..6");

  ok = true;
  const Rational omega(3, 2);
  for (int N = 2; N <= 6; ++N)
    for (int mu = 0; mu < 4; ++mu) {
      const FockState s = apply_to_vacuum(build_alpha(N, mu, true));
      const FockState hs = apply(build_h_ph(N, omega), s);
      Polynomial expected = s.poly;
      expected *= omega;
      if (!(hs.poly == expected)) {
        ok = false;
        bad = "N=" + std::to_string(N) + " mu=" + std::to_string(mu) + " got " + hs.str();
      }
    }
  record("H_ph alpha^+|0> = omega alpha^+|0>", ok, ok ? "omega = 3/2, N = 2..6, all mu" : bad);

  ok = true;
  std::string norms;
  for (int N = 2; N <= 6; ++N)
    for (int mu = 0; mu < 4; ++mu) {
      const FockState s = apply_to_vacuum(build_alpha(N, mu, true));
      const Rational n = inner_product(s, s);
      const Rational expected = mu == 0 ? Rational(-N, N - 1) : Rational(N, N - 1);
      ok = ok && n == expected;
      if (mu <= 1 && N <= 3) norms += "N=" + std::to_string(N) + " mu=" + std::to_string(mu) + ": " + rstr(n) + "; ";
    }
  record("single-photon norms: spatial +N/(N-1), timelike -N/(N-1)", ok, norms);

  ok = true;
  for (int N = 2; N <= 3; ++N) {
    Polynomial p = Polynomial::scalar(1);
    for (int n = 0; n <= 4; ++n) {
      const auto par = time_parity(apply_to_vacuum(p));
      ok = ok && par && *par == (n % 2 ? -1 : 1);
      p = p * build_alpha(N, 1 + n % 3, true);
    }
  }
  record("time parity of an n-photon state is (-1)^n", ok, "n = 0..4, N = 2, 3");

  ok = true;
  for (int N = 2; N <= 4; ++N) {
    const Polynomial H = build_h_ph(N, 1);
    ok = ok && H == H.dagger();
  }
  record("H_ph is Hermitian", ok, "N = 2..4");

  const algebra::Lightlike lambda{1, 0, 0, 1};
  ok = true;
  for (int N = 2; N <= 3; ++N) {
    const auto trans = subsidiary_check(apply_to_vacuum(build_alpha(N, 1, true)), lambda, N);
    const auto scalar = subsidiary_check(apply_to_vacuum(build_alpha(N, 0, true)), lambda, N);
    for (bool b : trans) ok = ok && b;
    for (bool b : scalar) ok = ok && !b;
  }
  record("subsidiary condition: transverse photons pass, timelike photons fail", ok,
         "lambda = (1,0,0,1), N = 2, 3, every color");

  for (int N = 2; N <= 3; ++N) {
    const PositivityReport rep = physical_positivity(N, 3, lambda);
    std::ostringstream os;
    os << "basis " << rep.basis_size << ", physical subspace " << rep.physical_dimension;
    if (rep.negative_witness)
      os << ", witness " << rep.negative_witness->str() << " norm " << rstr(*rep.witness_norm);
    record("physical subspace positive semi-definite up to 3 photons, N = " + std::to_string(N),
           rep.positive_semidefinite && rep.physical_dimension > 0, os.str());
  }
  return out;
}

}  // namespace mcced
