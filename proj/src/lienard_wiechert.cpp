#include "mcced/lienard_wiechert.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mcced {

FieldTensor external_field_at(const ExternalField& field, const FourVector& x,
                              bool from_above) {
  using K = ExternalField::Kind;
  FieldTensor F;
  if (field.kind == K::none) return F;
  const double env = field.envelope(x(0), from_above);
  if (env == 0.0) return F;
  const Vec3 r = spatial(x);
  switch (field.kind) {
    case K::none:
      break;
    case K::uniform_electric:
      F.E = field.amplitude * field.direction;
      break;
    case K::uniform_magnetic:
      F.B = field.amplitude * field.direction;
      break;
    case K::coulomb_center: {
      const Vec3 d = r - field.center;
      const double dist = d.norm();
      if (dist == 0.0) fail(ErrorCode::singularity, "field point at coulomb center");
      F.E = field.amplitude * kInvFourPi * d / (dist * dist * dist);
      break;
    }
    case K::plane_wave: {
      const double arg = field.omega * (x(0) - field.direction.dot(r)) + field.phase;
      F.E = field.amplitude * std::cos(arg) * field.polarization;
      F.B = field.direction.cross(F.E);
      break;
    }
  }
  F *= env;
  return F;
}

const char* to_string(LightConeBranch b) {
  return b == LightConeBranch::retarded ? "retarded" : "advanced";
}

namespace {

double branch_sign(LightConeBranch b) { return b == LightConeBranch::retarded ? 1.0 : -1.0; }

struct ConeEval {
  double phi;
  double dphi;
  double dist;
};

// phi(t') = s (x⁰ − t') − |x − r(t')|; root is the light-cone point.
ConeEval cone_function(const Worldline& w, const FourVector& x, double s, double tp) {
  Vec3 r, v, a;
  w.coordinate_state(tp, r, v, a);
  const Vec3 d = spatial(x) - r;
  const double dist = d.norm();
  const double ndotv = dist > 0.0 ? d.dot(v) / dist : 0.0;
  return {s * (x(0) - tp) - dist, -s + ndotv, dist};
}

}  // namespace

double light_cone_time(const Worldline& w, const FourVector& x, LightConeBranch branch,
                       const LightConeOptions& opts) {
  if (w.empty()) fail(ErrorCode::usage, "light_cone_time: empty worldline");
  if (!x.allFinite()) fail(ErrorCode::domain, "light_cone_time: non-finite field point");
  const double s = branch_sign(branch);
  const double scale = 1.0 + std::abs(x(0));
  const ConeEval at_x0 = cone_function(w, x, s, x(0));
  const double singular_tol = 1e-13 * (scale + spatial(x).norm());
  if (at_x0.dist <= singular_tol)
    fail(ErrorCode::singularity, "field point lies on the worldline");

  // phi(x⁰) = −dist < 0; step away from x⁰ (into the past for retarded, the
  // future for advanced) until phi changes sign.
  double near = x(0);
  double far = x(0);
  double delta = at_x0.dist;
  for (;;) {
    if (delta > opts.horizon)
      fail(ErrorCode::horizon, std::string("light cone (") + to_string(branch) +
                                   ") not bracketed within history horizon");
    far = x(0) - s * delta;
    const ConeEval e = cone_function(w, x, s, far);
    if (e.phi >= 0.0) break;
    near = far;
    delta *= 2.0;
  }
  double lo = std::min(near, far);
  double hi = std::max(near, far);
  // phi is monotone with sign(dphi) = −s.
  auto phi_at_lo_positive = [&] { return s > 0; };
  double t = 0.5 * (lo + hi);
  const double tol = 1e-12 * scale;
  bool converged = false;
  for (int iter = 0; iter < 200; ++iter) {
    const ConeEval e = cone_function(w, x, s, t);
    if ((e.phi > 0.0) == phi_at_lo_positive())
      lo = t;
    else
      hi = t;
    double next = t - e.phi / e.dphi;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - t);
    t = next;
    if (std::abs(e.phi) <= tol && step <= 4.0 * std::numeric_limits<double>::epsilon() * scale) {
      converged = true;
      break;
    }
    if (hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * scale) {
      converged = true;
      break;
    }
  }
  const ConeEval final_eval = cone_function(w, x, s, t);
  if (!converged && std::abs(final_eval.phi) > tol)
    fail(ErrorCode::numerical_limit, "light cone root did not converge");
  if (final_eval.dist <= singular_tol)
    fail(ErrorCode::singularity, "field point lies on the worldline");
  return t;
}

FourVector lw_potential(const Worldline& w, double charge, const FourVector& x,
                        LightConeBranch branch, const LightConeOptions& opts) {
  const double s = branch_sign(branch);
  const double tp = light_cone_time(w, x, branch, opts);
  Vec3 r, v, a;
  w.coordinate_state(tp, r, v, a);
  const Vec3 d = spatial(x) - r;
  const double dist = d.norm();
  const double kappa = 1.0 - s * d.dot(v) / dist;
  const double phi = charge * kInvFourPi / (dist * kappa);
  return make_four(phi, Vec3(phi * v));
}

FieldParts lw_field_parts(const Worldline& w, double charge, const FourVector& x,
                          LightConeBranch branch, const LightConeOptions& opts) {
  const double s = branch_sign(branch);
  FieldParts out;
  out.source_time = light_cone_time(w, x, branch, opts);
  Vec3 r, beta, beta_dot;
  w.coordinate_state(out.source_time, r, beta, beta_dot);
  const Vec3 d = spatial(x) - r;
  const double dist = d.norm();
  const Vec3 n = d / dist;
  const Vec3 m = n - s * beta;
  const double kappa = 1.0 - s * n.dot(beta);
  const double k3 = kappa * kappa * kappa;
  const double inv_gamma2 = 1.0 - beta.squaredNorm();
  const double pref = charge * kInvFourPi;
  out.velocity.E = pref * inv_gamma2 / (k3 * dist * dist) * m;
  out.radiation.E = pref / (k3 * dist) * n.cross(m.cross(beta_dot));
  out.velocity.B = s * n.cross(out.velocity.E);
  out.radiation.B = s * n.cross(out.radiation.E);
  return out;
}

FieldTensor lw_field(const Worldline& w, double charge, const FourVector& x,
                     LightConeBranch branch, const LightConeOptions& opts) {
  return lw_field_parts(w, charge, x, branch, opts).total();
}

FieldTensor field_half_sum(const Worldline& w, double charge, const FourVector& x,
                           const LightConeOptions& opts) {
  FieldTensor F = lw_field(w, charge, x, LightConeBranch::retarded, opts);
  F += lw_field(w, charge, x, LightConeBranch::advanced, opts);
  return 0.5 * F;
}

FieldTensor field_half_difference(const Worldline& w, double charge, const FourVector& x,
                                  const LightConeOptions& opts) {
  FieldTensor F = lw_field(w, charge, x, LightConeBranch::retarded, opts);
  F -= lw_field(w, charge, x, LightConeBranch::advanced, opts);
  return 0.5 * F;
}

FieldTensor minus_field_on_worldline(const Worldline& w, double charge, double t,
                                     const PointSplitOptions& opts,
                                     PointSplitDiagnostics* diag) {
  const WorldlineState st = w.state_at(t);
  const double accel = std::sqrt(std::max(0.0, -minkowski_dot(st.acceleration, st.acceleration)));
  double eps = opts.initial_offset;
  if (!(eps > 0.0)) eps = accel > 1e-3 ? 1e-3 / accel : 1.0;

  // Rest-frame spatial unit vectors carried into the lab frame.
  const Vec3 v = spatial(st.velocity) / st.velocity(0);
  const Eigen::Matrix4d to_lab = boost_matrix<double>(-v);
  FieldTensor level[3];
  for (int l = 0; l < 3; ++l) {
    const double h = eps / double(1 << l);
    FieldTensor acc;
    for (int axis = 0; axis < 3; ++axis) {
      FourVector dir = FourVector::Zero();
      dir(axis + 1) = 1.0;
      const FourVector offset = h * (to_lab * dir);
      acc += field_half_difference(w, charge, st.position + offset);
      acc += field_half_difference(w, charge, st.position - offset);
    }
    level[l] = (1.0 / 6.0) * acc;
  }
  const FieldTensor ra = (1.0 / 3.0) * (4.0 * level[1] - level[0]);
  const FieldTensor rb = (1.0 / 3.0) * (4.0 * level[2] - level[1]);
  const FieldTensor result = (1.0 / 15.0) * (16.0 * rb - ra);
  if (diag) {
    diag->offset = eps;
    for (int l = 0; l < 3; ++l) diag->level[l] = level[l];
    diag->richardson[0] = ra;
    diag->richardson[1] = rb;
  }
  // Noise floor: cancellation between O(e/ε²) retarded and advanced values.
  const double floor = 1e-9 * std::abs(charge) * kInvFourPi / (eps * eps / 16.0);
  const double spread = max_abs_diff(ra, rb);
  if (spread > opts.agreement * result.max_abs() + floor) {
    std::ostringstream msg;
    msg << "point-split limit did not converge: offset=" << eps
        << " |R(eps,eps/2)-R(eps/2,eps/4)|=" << spread
        << " |estimate|=" << result.max_abs()
        << " levels=" << level[0].max_abs() << "," << level[1].max_abs() << ","
        << level[2].max_abs();
    fail(ErrorCode::numerical_limit, msg.str());
  }
  return result;
}

FourVector self_minus_force_at_time(const Worldline& w, double charge, double t,
                                    const PointSplitOptions& opts) {
  const WorldlineState st = w.state_at(t);
  return lorentz_force(minus_field_on_worldline(w, charge, t, opts), st.velocity, charge);
}

FourVector self_minus_force(const Worldline& w, double charge, double tau,
                            const PointSplitOptions& opts) {
  return self_minus_force_at_time(w, charge, time_at_proper_time(w, tau), opts);
}

FourVector ald_force(double charge, const FourVector& u, const FourVector& a,
                     const FourVector& a_dot) {
  const double coeff = 2.0 / 3.0 * charge * charge * kInvFourPi;
  return coeff * (a_dot + minkowski_dot(a, a) * u);
}

namespace {

double inv_gamma_at(const Worldline& w, double t) {
  Vec3 r, v, a;
  w.coordinate_state(t, r, v, a);
  return std::sqrt(1.0 - v.squaredNorm());
}

}  // namespace

double proper_time_at(const Worldline& w, double t) {
  if (w.empty()) fail(ErrorCode::usage, "proper_time_at: empty worldline");
  const auto& s = w.samples();
  if (t <= s.front().position(0))
    return s.front().tau + (t - s.front().position(0)) / s.front().velocity(0);
  if (t >= s.back().position(0))
    return s.back().tau + (t - s.back().position(0)) / s.back().velocity(0);
  const std::size_t i = w.interval_index(t);
  const double t0 = s[i].position(0);
  const double h = t - t0;
  return s[i].tau + h / 6.0 * (inv_gamma_at(w, t0) + 4.0 * inv_gamma_at(w, t0 + 0.5 * h) +
                               inv_gamma_at(w, t));
}

double time_at_proper_time(const Worldline& w, double tau) {
  if (w.empty()) fail(ErrorCode::usage, "time_at_proper_time: empty worldline");
  if (!std::isfinite(tau)) fail(ErrorCode::domain, "proper time is not finite");
  const auto& s = w.samples();
  if (tau <= s.front().tau)
    return s.front().position(0) + (tau - s.front().tau) * s.front().velocity(0);
  if (tau >= s.back().tau)
    return s.back().position(0) + (tau - s.back().tau) * s.back().velocity(0);
  auto it = std::upper_bound(s.begin(), s.end(), tau,
                             [](double value, const WorldlineSample& x) { return value < x.tau; });
  const std::size_t i = static_cast<std::size_t>(std::distance(s.begin(), it)) - 1;
  const double t0 = s[i].position(0);
  const double t1 = s[i + 1].position(0);
  double t = t0 + (tau - s[i].tau) / (s[i + 1].tau - s[i].tau) * (t1 - t0);
  for (int iter = 0; iter < 50; ++iter) {
    const double resid = proper_time_at(w, t) - tau;
    const double dt = resid / inv_gamma_at(w, t);
    t -= dt;
    if (std::abs(dt) <= 1e-15 * (1.0 + std::abs(t))) break;
  }
  return t;
}

}  // namespace mcced
