#include "mcced/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mcced {

double tau0(double charge, double mass) {
  if (!(mass > 0.0)) fail(ErrorCode::domain, "tau0: mass must be > 0");
  return 2.0 / 3.0 * charge * charge * kInvFourPi / mass;
}

double larmor_power(const FourVector& u, const FourVector& a, double charge) {
  (void)u;
  return -2.0 / 3.0 * charge * charge * kInvFourPi * minkowski_dot(a, a);
}

Worldline ParticleTrack::worldline() const {
  std::vector<WorldlineSample> ws;
  ws.reserve(samples.size());
  for (const RecordSample& r : samples) ws.push_back({r.tau, r.position, r.velocity, r.acceleration});
  return Worldline(std::move(ws));
}

std::vector<Worldline> TrajectoryRecord::worldlines() const {
  std::vector<Worldline> out;
  out.reserve(particles.size());
  for (const ParticleTrack& p : particles) out.push_back(p.worldline());
  return out;
}

namespace {

FourVector flip_time(FourVector v) {
  v(0) = -v(0);
  return v;
}

FourVector flip_space(FourVector v) {
  v.tail<3>() *= -1.0;
  return v;
}

}  // namespace

TrajectoryRecord time_reversed(const TrajectoryRecord& r) {
  TrajectoryRecord out = r;
  for (ParticleTrack& p : out.particles) {
    std::reverse(p.samples.begin(), p.samples.end());
    for (RecordSample& s : p.samples) {
      s.tau = -s.tau;
      s.position = flip_time(s.position);
      s.velocity = flip_space(s.velocity);
      s.acceleration = flip_time(s.acceleration);
      s.force_external = flip_time(s.force_external);
      s.force_interaction = flip_time(s.force_interaction);
      s.force_self = flip_time(s.force_self);
    }
  }
  return out;
}

EnergyLedger energy_ledger(const TrajectoryRecord& r) {
  EnergyLedger L;
  if (r.particles.empty() || r.particles.front().samples.empty()) return L;
  for (const ParticleTrack& p : r.particles) {
    const auto& sm = p.samples;
    L.kinetic_initial += p.mass * (sm.front().velocity(0) - 1.0);
    L.kinetic_final += p.mass * (sm.back().velocity(0) - 1.0);
    for (std::size_t i = 1; i < sm.size(); ++i) {
      const double h = sm[i].t() - sm[i - 1].t();
      L.radiated += 0.5 * h * (sm[i].larmor + sm[i - 1].larmor);
      L.external_work += 0.5 * h *
                         (sm[i].force_external(0) / sm[i].velocity(0) +
                          sm[i - 1].force_external(0) / sm[i - 1].velocity(0));
    }
  }
  auto potential = [&](bool last) {
    double pe = 0.0;
    for (std::size_t i = 0; i < r.particles.size(); ++i)
      for (std::size_t j = i + 1; j < r.particles.size(); ++j) {
        const auto& a = r.particles[i];
        const auto& b = r.particles[j];
        const FourVector& xa = last ? a.samples.back().position : a.samples.front().position;
        const FourVector& xb = last ? b.samples.back().position : b.samples.front().position;
        pe += a.charge * b.charge * kInvFourPi / (spatial(xa) - spatial(xb)).norm();
      }
    return pe;
  };
  L.potential_initial = potential(false);
  L.potential_final = potential(true);
  L.closure_residual = L.delta_kinetic() + L.radiated + L.delta_potential() - L.external_work;
  return L;
}

namespace {

double fd_step(double dt) { return std::min(1e-3, 0.1 * dt); }

FourVector accel_from_spatial(const Vec3& as, const FourVector& u) {
  return make_four(spatial(u).dot(as) / u(0), as);
}

double accel_magnitude(const FourVector& a) {
  return std::sqrt(std::max(0.0, -minkowski_dot(a, a)));
}

FieldTensor applied_external(const Scenario& s, const FourVector& x, bool from_above) {
  FieldTensor F = external_field_at(s.external, x, from_above);
  if (s.topology.mode == CouplingMode::ced)
    F += external_field_at(s.topology.free_field, x, from_above);
  return F;
}

std::vector<double> declared_switches(const Scenario& s) {
  std::vector<double> sw = s.external.switch_times();
  if (s.topology.mode == CouplingMode::ced)
    for (double t : s.topology.free_field.switch_times()) sw.push_back(t);
  return sw;
}

// Uniform grid from t0 to t1 (either direction) with switch times as nodes.
std::vector<double> time_grid(double t0, double t1, double dt, const std::vector<double>& sw) {
  const double span = t1 - t0;
  const double dir = span >= 0.0 ? 1.0 : -1.0;
  const auto n = static_cast<std::size_t>(
      std::max(1.0, std::ceil(std::abs(span) / dt - 1e-9)));
  std::vector<double> g;
  g.reserve(n + 1 + sw.size());
  for (std::size_t i = 0; i < n; ++i) g.push_back(t0 + dir * static_cast<double>(i) * dt);
  g.push_back(t1);
  const double lo = std::min(t0, t1), hi = std::max(t0, t1);
  for (double s : sw) {
    if (!(s > lo && s < hi)) continue;
    auto it = std::min_element(g.begin(), g.end(), [s](double a, double b) {
      return std::abs(a - s) < std::abs(b - s);
    });
    if (std::abs(*it - s) < 1e-9 * dt)
      *it = s;
    else
      g.push_back(s);
  }
  if (dir > 0)
    std::sort(g.begin(), g.end());
  else
    std::sort(g.begin(), g.end(), std::greater<>());
  return g;
}

// One-sided envelope flag for an interval: below a switch that ends it, the
// limit from below is taken.
bool side_for(double ta, double tb, const std::vector<double>& sw) {
  const double hi = std::max(ta, tb);
  for (double s : sw)
    if (s == hi) return false;
  return true;
}

struct ForceParts {
  FourVector ext = FourVector::Zero();
  FourVector inter = FourVector::Zero();
  FourVector self = FourVector::Zero();
  FourVector total() const { return ext + inter + self; }
};

// Fields and four-forces acting on particle k. Neighbour fields come from
// `sources` weighted w_ret retarded + w_adv advanced; the self term is
// self_sign times the reduction-of-order radiation reaction, or a held
// point-split value.
class ForceModel {
 public:
  ForceModel(const Scenario& s, double w_ret, double w_adv, double self_sign,
             SelfForceModel model, double h)
      : s_(s), w_ret_(w_ret), w_adv_(w_adv), self_sign_(self_sign), model_(model), h_(h) {}

  const std::vector<Worldline>* sources = nullptr;
  std::vector<FourVector> held_self;

  void fields(std::size_t k, const FourVector& X, bool side, FieldTensor& ext,
              FieldTensor& inter) const {
    ext = applied_external(s_, X, side);
    inter = FieldTensor{};
    if (!sources) return;
    for (std::size_t j = 0; j < sources->size(); ++j) {
      if (j == k) continue;
      const double e = s_.particles[j].charge;
      const Worldline& w = (*sources)[j];
      if (w_ret_ != 0.0) inter += w_ret_ * lw_field(w, e, X, LightConeBranch::retarded);
      if (w_adv_ != 0.0) inter += w_adv_ * lw_field(w, e, X, LightConeBranch::advanced);
    }
  }

  ForceParts eval(std::size_t k, const FourVector& X, const FourVector& u, bool side) const {
    const double e = s_.particles[k].charge;
    const double m = s_.particles[k].mass;
    FieldTensor Fe, Fi;
    fields(k, X, side, Fe, Fi);
    ForceParts f;
    f.ext = lorentz_force(Fe, u, e);
    f.inter = lorentz_force(Fi, u, e);
    if (self_sign_ == 0.0) return f;
    if (model_ == SelfForceModel::minus_field) {
      f.self = held_self.at(k);
      return f;
    }
    if (model_ != SelfForceModel::landau_lifshitz) return f;
    const FourVector f0 = f.ext + f.inter;
    auto shifted = [&](double sg) {
      const FourVector Xs = X + sg * h_ * u;
      const FourVector us = u + sg * h_ / m * f0;
      FieldTensor a, b;
      fields(k, Xs, side, a, b);
      return lorentz_force(FieldTensor(a + b), us, e);
    };
    const FourVector fdot = (shifted(1.0) - shifted(-1.0)) / (2.0 * h_);
    f.self = self_sign_ * tau0(e, m) * (fdot + minkowski_dot(f0, f0) / m * u);
    return f;
  }

  double self_sign() const { return self_sign_; }
  SelfForceModel model() const { return model_; }

 private:
  const Scenario& s_;
  double w_ret_, w_adv_, self_sign_;
  SelfForceModel model_;
  double h_;
};

struct Body {
  Vec3 x;
  Vec3 u;
};

std::vector<Body> initial_bodies(const Scenario& s) {
  std::vector<Body> b;
  for (const Particle& p : s.particles)
    b.push_back({p.position, spatial(four_velocity(p.velocity))});
  return b;
}

FourVector u4(const Vec3& u) { return four_velocity_from_spatial(u); }

// Own history plus a Taylor-extrapolated future, for the point-split self
// field at the newest node. Only a trailing window of the history is kept.
Worldline extrapolated_self_worldline(const Worldline& hist, const WorldlineState& now,
                                      double tau_now, double dt, double span) {
  const auto& hs = hist.samples();
  std::vector<WorldlineSample> out;
  const double t = now.position(0);
  for (const WorldlineSample& s : hs)
    if (s.position(0) >= t - span && s.position(0) < t) out.push_back(s);
  out.push_back({tau_now, now.position, now.velocity, now.acceleration});
  auto coord_accel = [](const FourVector& u, const FourVector& a) -> Vec3 {
    return (spatial(a) * u(0) - spatial(u) * a(0)) / (u(0) * u(0) * u(0));
  };
  const Vec3 r = spatial(now.position);
  const Vec3 v = spatial(now.velocity) / now.velocity(0);
  const Vec3 acc = coord_accel(now.velocity, now.acceleration);
  Vec3 jerk = Vec3::Zero();
  if (!hs.empty() && hs.back().position(0) < t) {
    const auto& prev = hs.back();
    jerk = (acc - coord_accel(prev.velocity, prev.acceleration)) / (t - prev.position(0));
  }
  const auto n = static_cast<int>(std::ceil(span / dt));
  for (int i = 1; i <= n; ++i) {
    const double d = i * dt;
    const Vec3 ri = r + v * d + acc * (d * d / 2) + jerk * (d * d * d / 6);
    const Vec3 vi = v + acc * d + jerk * (d * d / 2);
    if (!(vi.norm() < 1.0)) break;
    const WorldlineState st = kinematic_state(t + d, ri, vi, acc + jerk * d);
    out.push_back({tau_now + d * std::sqrt(1.0 - vi.squaredNorm()), st.position, st.velocity,
                   st.acceleration});
  }
  return Worldline(std::move(out));
}

// Fixed-step RK4 in coordinate time. When `live` is given, each node is
// appended to the particle histories after its first-stage forces are known,
// so neighbour fields always see the stored history.
TrajectoryRecord run_rk4(const Scenario& s, ForceModel& model, std::vector<Body> state,
                         double t0, double t1, std::vector<Worldline>* live) {
  const double dt = s.integrator.dt;
  const std::vector<double> sw = declared_switches(s);
  const std::vector<double> grid = time_grid(t0, t1, dt, sw);
  const std::size_t N = state.size();

  TrajectoryRecord rec;
  rec.dt = dt;
  rec.p = s.topology.p;
  for (const Particle& p : s.particles) {
    ParticleTrack tr;
    tr.charge = p.charge;
    tr.mass = p.mass;
    tr.samples.reserve(grid.size());
    rec.particles.push_back(std::move(tr));
  }
  if (live) {
    live->clear();
    for (std::size_t k = 0; k < N; ++k)
      live->push_back(Worldline::inertial(state[k].x, state[k].u / u4(state[k].u)(0), t0));
    model.sources = live;
  }
  const bool minus_self =
      live && model.self_sign() != 0.0 && model.model() == SelfForceModel::minus_field;
  if (minus_self) model.held_self.assign(N, FourVector::Zero());

  std::vector<double> tau(N, 0.0);
  using Deriv = std::vector<Body>;
  auto derivs = [&](double t, const std::vector<Body>& st, bool side,
                    std::vector<ForceParts>* parts, std::vector<double>* inv_u0) {
    Deriv d(N);
    for (std::size_t k = 0; k < N; ++k) {
      const FourVector u = u4(st[k].u);
      const ForceParts f = model.eval(k, make_four(t, st[k].x), u, side);
      d[k].x = st[k].u / u(0);
      d[k].u = spatial(f.total()) / (s.particles[k].mass * u(0));
      if (parts) (*parts)[k] = f;
      if (inv_u0) (*inv_u0)[k] = 1.0 / u(0);
    }
    return d;
  };
  auto axpy = [&](const std::vector<Body>& st, double h, const Deriv& d) {
    std::vector<Body> out = st;
    for (std::size_t k = 0; k < N; ++k) {
      out[k].x += h * d[k].x;
      out[k].u += h * d[k].u;
    }
    return out;
  };

  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    const bool last = i + 1 == grid.size();
    const double tn = last ? t : grid[i + 1];
    const bool side = last ? (i == 0 ? true : side_for(grid[i - 1], t, sw)) : side_for(t, tn, sw);

    if (minus_self) {
      for (std::size_t k = 0; k < N; ++k) {
        const FourVector u = u4(state[k].u);
        const FourVector X = make_four(t, state[k].x);
        FieldTensor Fe, Fi;
        model.fields(k, X, side, Fe, Fi);
        const double e = s.particles[k].charge, m = s.particles[k].mass;
        const FourVector f = lorentz_force(FieldTensor(Fe + Fi), u, e) + model.held_self[k];
        const WorldlineState now{X, u, accel_from_spatial(spatial(f) / m, u)};
        const double amag = accel_magnitude(now.acceleration);
        PointSplitOptions opts;
        opts.initial_offset = std::max(amag > 1e-3 ? 1e-3 / amag : 1.0, 4.0 * dt);
        const double span = 4.0 * opts.initial_offset + 4.0 * dt;
        const Worldline own = extrapolated_self_worldline((*live)[k], now, tau[k], dt, span);
        model.held_self[k] =
            model.self_sign() * self_minus_force_at_time(own, e, t, opts);
      }
    }

    std::vector<ForceParts> parts(N);
    std::vector<double> iu1(N);
    const Deriv d1 = derivs(t, state, side, &parts, &iu1);
    for (std::size_t k = 0; k < N; ++k) {
      const Particle& p = s.particles[k];
      RecordSample smp;
      smp.tau = tau[k];
      smp.position = make_four(t, state[k].x);
      smp.velocity = u4(state[k].u);
      smp.acceleration = accel_from_spatial(spatial(parts[k].total()) / p.mass, smp.velocity);
      smp.larmor = larmor_power(smp.velocity, smp.acceleration, p.charge);
      smp.force_external = parts[k].ext;
      smp.force_interaction = parts[k].inter;
      smp.force_self = parts[k].self;
      if (!is_finite(smp.position) || !is_finite(smp.velocity) || !is_finite(smp.acceleration))
        fail(ErrorCode::numerical_limit,
             "non-finite state for particle " + std::to_string(k) + " at t=" + std::to_string(t));
      rec.particles[k].samples.push_back(smp);
      if (live) {
        const WorldlineSample ws{smp.tau, smp.position, smp.velocity, smp.acceleration};
        if (i == 0)
          (*live)[k] = Worldline({ws});
        else
          (*live)[k].push_back(ws);
      }
    }
    if (last) break;

    const double h = tn - t;
    std::vector<double> iu2(N), iu3(N), iu4(N);
    const Deriv d2 = derivs(t + h / 2, axpy(state, h / 2, d1), side, nullptr, &iu2);
    const Deriv d3 = derivs(t + h / 2, axpy(state, h / 2, d2), side, nullptr, &iu3);
    const Deriv d4 = derivs(tn, axpy(state, h, d3), side, nullptr, &iu4);
    for (std::size_t k = 0; k < N; ++k) {
      state[k].x += h / 6 * (d1[k].x + 2 * d2[k].x + 2 * d3[k].x + d4[k].x);
      state[k].u += h / 6 * (d1[k].u + 2 * d2[k].u + 2 * d3[k].u + d4[k].u);
      tau[k] += h / 6 * (iu1[k] + 2 * iu2[k] + 2 * iu3[k] + iu4[k]);
    }
  }
  rec.notes.push_back("four-velocity stored through its spatial part; u.u = 1 and u.a = 0 hold by construction");
  return rec;
}

double self_sign_for(const Scenario& s, double p) {
  return s.integrator.self_force == SelfForceModel::none ? 0.0 : p;
}

void require_particles(const Scenario& s, const char* what) {
  if (s.particles.empty()) fail(ErrorCode::usage, std::string(what) + ": scenario has no particles");
}

void require_single(const Scenario& s, const char* what) {
  if (s.particles.size() != 1)
    fail(ErrorCode::usage, std::string(what) + " integrates a single particle in an external field");
}

}  // namespace

FourVector ld_kernel(const Scenario& s, std::size_t k, double tau) {
  if (k >= s.size()) fail(ErrorCode::usage, "ld_kernel: particle index out of range");
  const Worldline wk = s.worldline(k);
  const double t = time_at_proper_time(wk, tau);
  const WorldlineState st = wk.state_at(t);
  FieldTensor F = applied_external(s, st.position, true);
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (j == k) continue;
    F += lw_field(s.worldline(j), s.particles[j].charge, st.position, LightConeBranch::retarded);
  }
  const double e = s.particles[k].charge;
  return lorentz_force(F, st.velocity, e) -
         larmor_power(st.velocity, st.acceleration, e) * st.velocity;
}

namespace {

// ∫_0^L [Ka + (Kb − Ka) s/L] e^{−s/τ0} ds/τ0 + e^{−L/τ0} I_next.
Vec3 exp_segment(const Vec3& I_next, const Vec3& Ka, const Vec3& Kb, double L, double t0) {
  const double q = L / t0;
  const double E = std::exp(-q);
  const double one_minus = -std::expm1(-q);
  const double w1 = q < 1e-3 ? q / 2 - q * q / 3 + q * q * q / 8 - q * q * q * q / 30
                             : one_minus / q - E;
  return E * I_next + one_minus * Ka + w1 * (Kb - Ka);
}

void record_convergence(ConvergenceReport* report, const ConvergenceReport& r) {
  if (report) *report = r;
}

[[noreturn]] void fail_convergence(const std::string& what, const ConvergenceReport& r) {
  std::ostringstream os;
  os << what << " did not converge; residual history:";
  for (double x : r.residuals) os << ' ' << x;
  fail(ErrorCode::convergence, os.str());
}

// Divergence: residual increased on three successive iterations.
bool diverging(const std::vector<double>& res) {
  if (res.size() < 4) return false;
  const std::size_t n = res.size();
  return res[n - 1] > res[n - 2] && res[n - 2] > res[n - 3] && res[n - 3] > res[n - 4];
}

}  // namespace

TrajectoryRecord integrate_ld_integro(const Scenario& s, ConvergenceReport* report) {
  require_single(s, "ld-integro");
  const Particle& P = s.particles[0];
  const double e = P.charge, m = P.mass;
  const double t0 = tau0(e, m);
  const IntegratorConfig& cfg = s.integrator;
  const std::vector<double> sw = declared_switches(s);
  const std::vector<double> grid = time_grid(0.0, cfg.t_end, cfg.dt, sw);
  const std::size_t M = grid.size();

  auto force = [&](double t, const Vec3& x, const FourVector& u, bool side) {
    return lorentz_force(applied_external(s, make_four(t, x), side), u, e);
  };

  std::vector<Vec3> dplus(M, Vec3::Zero()), dminus(M, Vec3::Zero());
  std::vector<Vec3> xs(M), us(M);
  std::vector<double> taus(M);

  auto integrate_path = [&]() {
    Vec3 x = P.position;
    Vec3 u = spatial(four_velocity(P.velocity));
    double tau = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
      xs[i] = x;
      us[i] = u;
      taus[i] = tau;
      if (i + 1 == M) break;
      const double t = grid[i], h = grid[i + 1] - t;
      const bool side = side_for(t, grid[i + 1], sw);
      auto rhs = [&](double tt, const Vec3& xx, const Vec3& uu, const Vec3& delta, Vec3& dx,
                     Vec3& du, double& dtau) {
        const FourVector U = u4(uu);
        dx = uu / U(0);
        du = (spatial(force(tt, xx, U, side)) + delta) / (m * U(0));
        dtau = 1.0 / U(0);
      };
      const Vec3 dmid = 0.5 * (dplus[i] + dminus[i + 1]);
      Vec3 x1, u1, x2, u2, x3, u3, x4, u4v;
      double s1, s2, s3, s4;
      rhs(t, x, u, dplus[i], x1, u1, s1);
      rhs(t + h / 2, x + h / 2 * x1, u + h / 2 * u1, dmid, x2, u2, s2);
      rhs(t + h / 2, x + h / 2 * x2, u + h / 2 * u2, dmid, x3, u3, s3);
      rhs(t + h, x + h * x3, u + h * u3, dminus[i + 1], x4, u4v, s4);
      x += h / 6 * (x1 + 2 * x2 + 2 * x3 + x4);
      u += h / 6 * (u1 + 2 * u2 + 2 * u3 + u4v);
      tau += h / 6 * (s1 + 2 * s2 + 2 * s3 + s4);
      if (!x.allFinite() || !u.allFinite())
        fail(ErrorCode::numerical_limit, "ld-integro: non-finite state at t=" + std::to_string(t));
    }
  };

  std::vector<Vec3> I(M);
  std::vector<Vec3> fplus(M), fminus(M);
  auto update_kernel = [&]() {
    // One-sided forces and kernels at the nodes of the current iterate.
    std::vector<Vec3> Kplus(M), Kminus(M);
    for (std::size_t i = 0; i < M; ++i) {
      const FourVector U = u4(us[i]);
      const bool sp = i + 1 < M ? side_for(grid[i], grid[i + 1], sw) : true;
      const bool sm = i > 0 ? side_for(grid[i - 1], grid[i], sw) : true;
      const FourVector fp = force(grid[i], xs[i], U, sp);
      const FourVector fm = force(grid[i], xs[i], U, sm);
      fplus[i] = spatial(fp);
      fminus[i] = spatial(fm);
      const FourVector ap = accel_from_spatial((fplus[i] + dplus[i]) / m, U);
      const FourVector am = accel_from_spatial((fminus[i] + dminus[i]) / m, U);
      Kplus[i] = spatial(fp - larmor_power(U, ap, e) * U);
      Kminus[i] = spatial(fm - larmor_power(U, am, e) * U);
    }
    // Inertial continuation past t_end over future_horizon·τ0 of proper time.
    const FourVector Ue = u4(us[M - 1]);
    const Vec3 ve = us[M - 1] / Ue(0);
    const double tE = grid[M - 1];
    const double span = cfg.future_horizon * t0 * Ue(0);
    const std::vector<double> cg = time_grid(tE, tE + span, cfg.dt, sw);
    std::vector<Vec3> Cp(cg.size()), Cm(cg.size());
    for (std::size_t c = 0; c < cg.size(); ++c) {
      const Vec3 xc = xs[M - 1] + ve * (cg[c] - tE);
      const bool sp = c + 1 < cg.size() ? side_for(cg[c], cg[c + 1], sw) : true;
      const bool sm = c > 0 ? side_for(cg[c - 1], cg[c], sw) : true;
      Cp[c] = spatial(force(cg[c], xc, Ue, sp));
      Cm[c] = spatial(force(cg[c], xc, Ue, sm));
    }
    Vec3 acc = Cm.back();
    for (std::size_t c = cg.size() - 1; c-- > 0;)
      acc = exp_segment(acc, Cp[c], Cm[c + 1], (cg[c + 1] - cg[c]) / Ue(0), t0);
    I[M - 1] = acc;
    for (std::size_t i = M - 1; i-- > 0;)
      I[i] = exp_segment(I[i + 1], Kplus[i], Kminus[i + 1], taus[i + 1] - taus[i], t0);
    for (std::size_t i = 0; i < M; ++i) {
      dplus[i] = I[i] - fplus[i];
      dminus[i] = I[i] - fminus[i];
    }
  };

  ConvergenceReport rep;
  integrate_path();
  std::vector<Vec3> prev = xs;
  while (true) {
    update_kernel();
    integrate_path();
    double res = 0.0;
    for (std::size_t i = 0; i < M; ++i) res = std::max(res, (xs[i] - prev[i]).cwiseAbs().maxCoeff());
    prev = xs;
    rep.iterations++;
    rep.residuals.push_back(res);
    if (res < cfg.tolerance) {
      rep.converged = true;
      break;
    }
    if (diverging(rep.residuals) || rep.iterations >= cfg.waveform_iterations) {
      record_convergence(report, rep);
      fail_convergence("ld-integro waveform iteration", rep);
    }
  }
  // Kernel of the converged path, so the recorded acceleration is I/m.
  update_kernel();
  record_convergence(report, rep);

  TrajectoryRecord rec;
  rec.method = "ld-integro";
  rec.p = s.topology.p;
  rec.dt = cfg.dt;
  ParticleTrack tr;
  tr.charge = e;
  tr.mass = m;
  for (std::size_t i = 0; i < M; ++i) {
    RecordSample smp;
    smp.tau = taus[i];
    smp.position = make_four(grid[i], xs[i]);
    smp.velocity = u4(us[i]);
    smp.acceleration = accel_from_spatial(I[i] / m, smp.velocity);
    smp.larmor = larmor_power(smp.velocity, smp.acceleration, e);
    smp.force_external = accel_from_spatial(fplus[i], smp.velocity);
    smp.force_self = accel_from_spatial(I[i] - fplus[i], smp.velocity);
    tr.samples.push_back(smp);
  }
  rec.particles.push_back(std::move(tr));
  rec.notes.push_back("waveform iterations: " + std::to_string(rep.iterations));
  return rec;
}

TrajectoryRecord integrate_ld_local(const Scenario& s, RunawayReport* report) {
  require_single(s, "ld-local");
  const Particle& P = s.particles[0];
  const double e = P.charge, m = P.mass;
  const double t0 = tau0(e, m);
  const IntegratorConfig& cfg = s.integrator;
  const std::vector<double> sw = declared_switches(s);
  const bool backward = cfg.terminal_condition;
  const double t_start = backward ? cfg.t_end : 0.0;
  const double t_stop = backward ? 0.0 : cfg.t_end;
  const double dir = backward ? -1.0 : 1.0;

  // Proper-time state: t, x, u (spatial), a (spatial).
  struct St {
    double t;
    Vec3 x, u, a;
  };
  auto force = [&](double t, const Vec3& x, const FourVector& U, bool side) {
    return lorentz_force(applied_external(s, make_four(t, x), side), U, e);
  };

  St st;
  st.t = t_start;
  st.x = P.position;
  if (backward) {
    st.u = spatial(four_velocity(P.velocity));
    const bool side = !std::any_of(sw.begin(), sw.end(), [&](double x) { return x == t_start; });
    st.a = spatial(force(t_start, st.x, u4(st.u), side)) / m;
  } else {
    const WorldlineState ks = kinematic_state(0.0, P.position, P.velocity, P.acceleration);
    st.u = spatial(ks.velocity);
    st.a = spatial(ks.acceleration);
  }

  RunawayReport rep;
  rep.expected_rate = 1.0 / t0;
  std::vector<RecordSample> samples;
  double tau = 0.0;
  auto record = [&](const St& x, bool side) {
    RecordSample r;
    r.tau = tau;
    r.position = make_four(x.t, x.x);
    r.velocity = u4(x.u);
    r.acceleration = accel_from_spatial(x.a, r.velocity);
    r.larmor = larmor_power(r.velocity, r.acceleration, e);
    r.force_external = force(x.t, x.x, r.velocity, side);
    r.force_self = m * r.acceleration - r.force_external;
    samples.push_back(r);
  };
  record(st, true);

  const double h_nominal = cfg.dt;
  const double a_limit = 1e100;
  while (dir * (t_stop - st.t) > 1e-12 * (1.0 + std::abs(t_stop))) {
    const double u0 = u4(st.u)(0);
    double target = st.t + dir * h_nominal * u0;
    if (dir * (target - t_stop) > 0) target = t_stop;
    for (double x : sw)
      if (dir * (x - st.t) > 0 && dir * (target - x) > 0) target = x;
    const double h = dir * std::abs(target - st.t) / u0;
    const double lo = std::min(st.t, target), hi = std::max(st.t, target);
    const bool side = side_for(st.t, target, sw);
    auto rhs = [&](const St& y) {
      const FourVector U = u4(y.u);
      const FourVector A = accel_from_spatial(y.a, U);
      const double te = std::clamp(y.t, lo, hi);
      const Vec3 f = spatial(force(te, y.x, U, side));
      St d;
      d.t = U(0);
      d.x = y.u;
      d.u = y.a;
      d.a = (m * y.a - f) / (m * t0) - minkowski_dot(A, A) * y.u;
      return d;
    };
    auto add = [](const St& y, double c, const St& d) {
      return St{y.t + c * d.t, y.x + c * d.x, y.u + c * d.u, y.a + c * d.a};
    };
    const St k1 = rhs(st);
    const St k2 = rhs(add(st, h / 2, k1));
    const St k3 = rhs(add(st, h / 2, k2));
    const St k4 = rhs(add(st, h, k3));
    St next = st;
    next.t += h / 6 * (k1.t + 2 * k2.t + 2 * k3.t + k4.t);
    next.x += h / 6 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x);
    next.u += h / 6 * (k1.u + 2 * k2.u + 2 * k3.u + k4.u);
    next.a += h / 6 * (k1.a + 2 * k2.a + 2 * k3.a + k4.a);
    if (std::abs(next.t - target) < 1e-9 * std::abs(h) * u0 + 1e-15) next.t = target;
    const bool bad = !std::isfinite(next.t) || !next.x.allFinite() || !next.u.allFinite() ||
                     !next.a.allFinite() || next.a.norm() > a_limit || next.u.norm() > a_limit;
    if (bad) {
      rep.truncated = true;
      rep.truncated_at = st.t;
      break;
    }
    st = next;
    tau += h;
    record(st, side);
  }
  if (backward) {
    std::reverse(samples.begin(), samples.end());
    for (RecordSample& r : samples) r.tau -= samples.front().tau;
  }

  // Fitted growth rate of ln|a| in proper time.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const RecordSample& r : samples) {
    const double am = accel_magnitude(r.acceleration);
    if (!(am > 0.0)) continue;
    const double y = std::log(am);
    sx += r.tau;
    sy += y;
    sxx += r.tau * r.tau;
    sxy += r.tau * y;
    ++n;
  }
  if (n >= 2) {
    const double den = n * sxx - sx * sx;
    if (den > 0) rep.growth_rate = (n * sxy - sx * sy) / den;
  }
  rep.runaway = rep.truncated || (!backward && rep.growth_rate > 0.5 / t0);
  {
    std::ostringstream os;
    os << "fitted growth rate " << rep.growth_rate << " vs 1/tau0 = " << rep.expected_rate;
    if (rep.truncated) os << "; truncated at t=" << rep.truncated_at;
    rep.detail = os.str();
  }
  if (report) *report = rep;

  TrajectoryRecord rec;
  rec.method = "ld-local";
  rec.p = s.topology.p;
  rec.dt = cfg.dt;
  ParticleTrack tr;
  tr.charge = e;
  tr.mass = m;
  tr.samples = std::move(samples);
  rec.particles.push_back(std::move(tr));
  if (rep.truncated) rec.notes.push_back("runaway overflow: " + rep.detail);
  if (backward) rec.notes.push_back("integrated backward from a(t_end) = F/m");
  return rec;
}

TrajectoryRecord integrate_landau_lifshitz(const Scenario& s) {
  require_particles(s, "landau-lifshitz");
  ForceModel model(s, 1.0, 0.0, 1.0, SelfForceModel::landau_lifshitz, fd_step(s.integrator.dt));
  std::vector<Worldline> live;
  TrajectoryRecord rec = run_rk4(s, model, initial_bodies(s), 0.0, s.integrator.t_end,
                                 s.size() > 1 ? &live : nullptr);
  rec.method = "landau-lifshitz";
  return rec;
}

TrajectoryRecord integrate_retarded_nbody(const Scenario& s) {
  require_particles(s, "nbody-retarded");
  if (s.topology.p != 1.0) fail(ErrorCode::domain, "nbody-retarded requires p = +1");
  ForceModel model(s, 1.0, 0.0, self_sign_for(s, 1.0), s.integrator.self_force,
                   fd_step(s.integrator.dt));
  std::vector<Worldline> live;
  TrajectoryRecord rec = run_rk4(s, model, initial_bodies(s), 0.0, s.integrator.t_end, &live);
  rec.method = "nbody-retarded";
  rec.p = 1.0;
  return rec;
}

namespace {

Scenario time_reversed_image(const Scenario& s) {
  Scenario img = s;
  img.topology.p = -s.topology.p;
  img.external = time_reversed(s.external);
  img.topology.free_field = time_reversed(s.topology.free_field);
  if (s.topology.boundary == CedBoundary::sommerfeld) img.topology.boundary = CedBoundary::outgoing;
  if (s.topology.boundary == CedBoundary::outgoing) img.topology.boundary = CedBoundary::sommerfeld;
  for (Particle& p : img.particles) {
    p.velocity = -p.velocity;
    if (!p.worldline.empty()) p.worldline = p.worldline.time_reversed();
  }
  return img;
}

}  // namespace

TrajectoryRecord integrate_advanced_nbody(const Scenario& s) {
  require_particles(s, "nbody-advanced");
  if (s.topology.p != -1.0) fail(ErrorCode::domain, "nbody-advanced requires p = -1");
  const TrajectoryRecord image = integrate_retarded_nbody(time_reversed_image(s));
  TrajectoryRecord rec = time_reversed(image);
  rec.method = "nbody-advanced";
  rec.p = -1.0;
  rec.notes.push_back("time-reversal image of a p = +1 run; data is the final state at t = 0");
  return rec;
}

TrajectoryRecord integrate_advanced_nbody_direct(const Scenario& s, ConvergenceReport* report) {
  require_particles(s, "nbody-advanced (direct)");
  if (s.topology.p != -1.0) fail(ErrorCode::domain, "nbody-advanced requires p = -1");
  const IntegratorConfig& cfg = s.integrator;
  const SelfForceModel sm = cfg.self_force == SelfForceModel::none ? SelfForceModel::none
                                                                    : SelfForceModel::landau_lifshitz;
  std::vector<Worldline> prev;
  for (const Particle& p : s.particles) prev.push_back(Worldline::inertial(p.position, p.velocity));
  ConvergenceReport rep;
  TrajectoryRecord rec;
  while (true) {
    ForceModel model(s, 0.0, 1.0, sm == SelfForceModel::none ? 0.0 : -1.0, sm, fd_step(cfg.dt));
    model.sources = &prev;
    rec = run_rk4(s, model, initial_bodies(s), 0.0, cfg.t_end, nullptr);
    double res = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k)
      for (const RecordSample& smp : rec.particles[k].samples) {
        Vec3 r, v, a;
        prev[k].coordinate_state(smp.t(), r, v, a);
        res = std::max(res, (spatial(smp.position) - r).cwiseAbs().maxCoeff());
      }
    prev = rec.worldlines();
    rep.iterations++;
    rep.residuals.push_back(res);
    if (res < cfg.tolerance) {
      rep.converged = true;
      break;
    }
    if (diverging(rep.residuals) || rep.iterations >= cfg.waveform_iterations) {
      record_convergence(report, rep);
      fail_convergence("advanced waveform iteration", rep);
    }
  }
  record_convergence(report, rep);
  rec.method = "nbody-advanced-direct";
  rec.p = -1.0;
  rec.notes.push_back("direct advanced solve, waveform iterations: " +
                      std::to_string(rep.iterations));
  return rec;
}

TrajectoryRecord integrate(const Scenario& s, RunawayReport* runaway,
                           ConvergenceReport* convergence) {
  s.validate();
  switch (s.integrator.method) {
    case IntegratorMethod::ld_integro: return integrate_ld_integro(s, convergence);
    case IntegratorMethod::ld_local: return integrate_ld_local(s, runaway);
    case IntegratorMethod::landau_lifshitz: return integrate_landau_lifshitz(s);
    case IntegratorMethod::nbody_retarded: return integrate_retarded_nbody(s);
    case IntegratorMethod::nbody_advanced: return integrate_advanced_nbody(s);
  }
  fail(ErrorCode::usage, "unknown integrator method");
}

AsymptoticReport asymptotic_check(const TrajectoryRecord& r, double window, double tolerance) {
  AsymptoticReport rep;
  if (r.particles.empty()) return rep;
  double worst_rate = -std::numeric_limits<double>::infinity();
  for (const ParticleTrack& p : r.particles) {
    if (p.samples.empty()) continue;
    const double t_last = p.samples.back().t();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const RecordSample& smp : p.samples) {
      if (smp.t() < t_last - window) continue;
      const double am = accel_magnitude(smp.acceleration);
      rep.max_acceleration = std::max(rep.max_acceleration, am);
      if (am > 0.0) {
        const double y = std::log(am);
        sx += smp.t();
        sy += y;
        sxx += smp.t() * smp.t();
        sxy += smp.t() * y;
        ++n;
      }
    }
    if (n >= 2) {
      const double den = n * sxx - sx * sx;
      if (den > 0) worst_rate = std::max(worst_rate, (n * sxy - sx * sy) / den);
    }
  }
  rep.growth_rate = std::isfinite(worst_rate) ? worst_rate : 0.0;
  rep.pass = rep.max_acceleration <= tolerance;
  std::ostringstream os;
  os << "max |a| over trailing window " << window << ": " << rep.max_acceleration
     << " (tolerance " << tolerance << "), fitted d ln|a|/dt = " << rep.growth_rate;
  rep.detail = os.str();
  return rep;
}

MotionResidual motion_residual(const Scenario& s, const TrajectoryRecord& r, std::size_t skip) {
  if (r.particles.size() != s.size())
    fail(ErrorCode::usage, "motion_residual: record and scenario particle counts differ");
  const double p = s.topology.p;
  const std::vector<Worldline> ws = r.worldlines();
  const double dt = r.dt > 0 ? r.dt : s.integrator.dt;
  ForceModel model(s, 0.5 * (1.0 + p), 0.5 * (1.0 - p), self_sign_for(s, p),
                   s.integrator.self_force == SelfForceModel::none ? SelfForceModel::none
                                                                   : SelfForceModel::landau_lifshitz,
                   fd_step(dt));
  model.sources = &ws;
  MotionResidual out;
  double scale = 0.0;
  std::vector<std::vector<double>> raw(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    const auto& sm = r.particles[k].samples;
    const double m = s.particles[k].mass;
    raw[k].assign(sm.size(), 0.0);
    for (std::size_t i = skip; i + skip < sm.size(); ++i) {
      const ForceParts f = model.eval(k, sm[i].position, sm[i].velocity, true);
      const Vec3 F = spatial(f.total());
      scale = std::max(scale, F.norm());
      raw[k][i] = (m * spatial(sm[i].acceleration) - F).norm();
    }
  }
  if (!(scale > 0.0)) scale = 1.0;
  for (std::size_t k = 0; k < s.size(); ++k)
    for (std::size_t i = 0; i < raw[k].size(); ++i)
      if (raw[k][i] / scale > out.max_relative) {
        out.max_relative = raw[k][i] / scale;
        out.particle = k;
        out.sample = i;
      }
  return out;
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::pointer_basis_classical: return "pointer-basis classical";
    case Regime::quantum_superposition: return "quantum superposition";
    case Regime::intermediate: return "intermediate";
  }
  return "intermediate";
}

Regime classical_threshold(double correlation_length, double wavelength) {
  if (!(correlation_length > 0.0) || !(wavelength > 0.0) || !std::isfinite(correlation_length) ||
      !std::isfinite(wavelength))
    fail(ErrorCode::domain, "classical_threshold: lengths must be positive and finite");
  const double ratio = correlation_length / wavelength;
  if (ratio > 10.0) return Regime::pointer_basis_classical;
  if (ratio < 0.1) return Regime::quantum_superposition;
  return Regime::intermediate;
}

}  // namespace mcced
