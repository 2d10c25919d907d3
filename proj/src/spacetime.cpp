#include "mcced/spacetime.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mcced {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::domain: return "domain";
    case ErrorCode::usage: return "usage";
    case ErrorCode::horizon: return "horizon";
    case ErrorCode::singularity: return "singularity";
    case ErrorCode::numerical_limit: return "numerical-limit";
    case ErrorCode::convergence: return "convergence";
    case ErrorCode::parse: return "parse";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

bool is_finite(const FourVector& v) { return v.allFinite(); }

WorldlineState kinematic_state(double t, const Vec3& r, const Vec3& v,
                               const Vec3& dvdt) {
  const double gamma = 1.0 / std::sqrt(1.0 - v.squaredNorm());
  const double gamma_dot = gamma * gamma * gamma * v.dot(dvdt);
  WorldlineState s;
  s.position = make_four(t, r);
  s.velocity = make_four<double>(gamma, gamma * v);
  s.acceleration =
      gamma * make_four<double>(gamma_dot, gamma_dot * v + gamma * dvdt);
  return s;
}

Worldline::Worldline(std::vector<WorldlineSample> samples)
    : samples_(std::move(samples)) {
  for (std::size_t i = 1; i < samples_.size(); ++i) {
    if (!(samples_[i].position(0) > samples_[i - 1].position(0)))
      fail(ErrorCode::usage,
           "worldline sample times must be strictly increasing (sample " +
               std::to_string(i) + ")");
  }
}

Worldline Worldline::inertial(const Vec3& position, const Vec3& velocity,
                              double t0) {
  const WorldlineState s = kinematic_state(t0, position, velocity, Vec3::Zero());
  WorldlineSample sample;
  sample.tau = 0.0;
  sample.position = s.position;
  sample.velocity = s.velocity;
  sample.acceleration = s.acceleration;
  return Worldline({sample});
}

Worldline Worldline::from_function(
    const std::function<void(double, Vec3&, Vec3&, Vec3&)>& trajectory,
    double t0, double t1, double dt) {
  if (!(dt > 0.0) || !(t1 >= t0))
    fail(ErrorCode::usage, "from_function: need dt > 0 and t1 >= t0");
  const auto n = static_cast<std::size_t>(std::ceil((t1 - t0) / dt - 1e-9));
  const double h = n > 0 ? (t1 - t0) / static_cast<double>(n) : 0.0;
  auto inv_gamma = [&](double t) {
    Vec3 r, v, a;
    trajectory(t, r, v, a);
    return std::sqrt(1.0 - v.squaredNorm());
  };
  std::vector<WorldlineSample> samples;
  samples.reserve(n + 1);
  double tau = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = t0 + h * static_cast<double>(i);
    if (i > 0) {
      const double ta = t - h;
      tau += h / 6.0 * (inv_gamma(ta) + 4.0 * inv_gamma(ta + 0.5 * h) + inv_gamma(t));
    }
    Vec3 r, v, a;
    trajectory(t, r, v, a);
    const WorldlineState s = kinematic_state(t, r, v, a);
    samples.push_back({tau, s.position, s.velocity, s.acceleration});
    if (n == 0) break;
  }
  return Worldline(std::move(samples));
}

std::size_t Worldline::interval_index(double t) const {
  if (samples_.size() < 2) return 0;
  auto it = std::upper_bound(
      samples_.begin(), samples_.end(), t,
      [](double value, const WorldlineSample& s) { return value < s.position(0); });
  std::size_t idx = static_cast<std::size_t>(std::distance(samples_.begin(), it));
  idx = idx == 0 ? 0 : idx - 1;
  return std::min(idx, samples_.size() - 2);
}

void Worldline::coordinate_state(double t, Vec3& r, Vec3& v, Vec3& dvdt) const {
  if (samples_.empty()) fail(ErrorCode::usage, "worldline is empty");
  auto coord_velocity = [](const WorldlineSample& s) -> Vec3 {
    return spatial(s.velocity) / s.velocity(0);
  };
  const WorldlineSample& first = samples_.front();
  const WorldlineSample& last = samples_.back();
  if (t <= first.position(0) || samples_.size() == 1) {
    const WorldlineSample& anchor = t <= first.position(0) ? first : last;
    v = coord_velocity(anchor);
    r = spatial(anchor.position) + v * (t - anchor.position(0));
    dvdt.setZero();
    if (samples_.size() == 1 || t < first.position(0)) return;
  }
  if (t >= last.position(0)) {
    v = coord_velocity(last);
    r = spatial(last.position) + v * (t - last.position(0));
    dvdt.setZero();
    if (t > last.position(0)) return;
  }
  const std::size_t i = interval_index(t);
  const WorldlineSample& s0 = samples_[i];
  const WorldlineSample& s1 = samples_[i + 1];
  const double h = s1.position(0) - s0.position(0);
  const double s = (t - s0.position(0)) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const Vec3 x0 = spatial(s0.position);
  const Vec3 x1 = spatial(s1.position);
  const Vec3 v0 = coord_velocity(s0) * h;
  const Vec3 v1 = coord_velocity(s1) * h;
  r = (2 * s3 - 3 * s2 + 1) * x0 + (s3 - 2 * s2 + s) * v0 +
      (-2 * s3 + 3 * s2) * x1 + (s3 - s2) * v1;
  v = ((6 * s2 - 6 * s) * x0 + (3 * s2 - 4 * s + 1) * v0 +
       (-6 * s2 + 6 * s) * x1 + (3 * s2 - 2 * s) * v1) / h;
  dvdt = ((12 * s - 6) * x0 + (6 * s - 4) * v0 + (-12 * s + 6) * x1 +
          (6 * s - 2) * v1) / (h * h);
}

WorldlineState Worldline::state_at(double t) const {
  if (!std::isfinite(t)) fail(ErrorCode::domain, "worldline query time is not finite");
  Vec3 r, v, a;
  coordinate_state(t, r, v, a);
  return kinematic_state(t, r, v, a);
}

void Worldline::push_back(const WorldlineSample& sample) {
  if (!samples_.empty() && !(sample.position(0) > samples_.back().position(0)))
    fail(ErrorCode::usage, "worldline sample times must be strictly increasing");
  samples_.push_back(sample);
}

Worldline Worldline::time_reversed() const {
  std::vector<WorldlineSample> out;
  out.reserve(samples_.size());
  for (auto it = samples_.rbegin(); it != samples_.rend(); ++it) {
    WorldlineSample s;
    s.tau = -it->tau;
    s.position = it->position;
    s.position(0) = -it->position(0);
    s.velocity = it->velocity;
    s.velocity.tail<3>() *= -1.0;
    s.acceleration = it->acceleration;
    s.acceleration(0) = -it->acceleration(0);
    out.push_back(s);
  }
  return Worldline(std::move(out));
}

WorldlineState worldline_state_at(const Worldline& w, double t) {
  if (w.empty()) fail(ErrorCode::usage, "worldline_state_at: empty worldline");
  return w.state_at(t);
}

void ExternalField::validate() const {
  auto unit = [](const Vec3& d, const char* what) {
    if (std::abs(d.norm() - 1.0) > 1e-12)
      fail(ErrorCode::domain, std::string("external field ") + what +
                                  " must be a unit vector");
  };
  switch (kind) {
    case Kind::none:
      return;
    case Kind::uniform_electric:
    case Kind::uniform_magnetic:
      unit(direction, "direction");
      break;
    case Kind::coulomb_center:
      break;
    case Kind::plane_wave:
      unit(direction, "propagation direction");
      unit(polarization, "polarization");
      if (std::abs(direction.dot(polarization)) > 1e-12)
        fail(ErrorCode::domain, "plane wave polarization must be transverse");
      if (!(omega > 0.0)) fail(ErrorCode::domain, "plane wave omega must be > 0");
      break;
  }
  if (!(ramp >= 0.0)) fail(ErrorCode::domain, "external field ramp must be >= 0");
}

double ExternalField::envelope(double t, bool from_above) const {
  if (!std::isfinite(switch_on)) return 1.0;
  if (t < switch_on) return 0.0;
  if (ramp == 0.0) {
    if (t == switch_on) return from_above ? 1.0 : 0.0;
    return 1.0;
  }
  const double s = std::min(1.0, (t - switch_on) / ramp);
  return s * s * (3.0 - 2.0 * s);
}

std::vector<double> ExternalField::switch_times() const {
  if (kind != Kind::none && std::isfinite(switch_on) && ramp == 0.0) return {switch_on};
  return {};
}

ExternalField time_reversed(const ExternalField& f) {
  using K = ExternalField::Kind;
  if (f.kind == K::none) return f;
  if (std::isfinite(f.switch_on))
    fail(ErrorCode::usage, "time reversal of a switched external field is not representable");
  ExternalField out = f;
  switch (f.kind) {
    case K::uniform_magnetic: out.amplitude = -f.amplitude; break;
    case K::plane_wave:
      out.direction = -f.direction;
      out.phase = -f.phase;
      break;
    default: break;
  }
  return out;
}

ExternalField space_reflected(const ExternalField& f) {
  using K = ExternalField::Kind;
  ExternalField out = f;
  switch (f.kind) {
    case K::uniform_electric: out.amplitude = -f.amplitude; break;
    case K::coulomb_center: out.center = -f.center; break;
    case K::plane_wave:
      out.direction = -f.direction;
      out.polarization = -f.polarization;
      break;
    default: break;
  }
  return out;
}

ExternalField charge_conjugated(const ExternalField& f) {
  ExternalField out = f;
  out.amplitude = -f.amplitude;
  return out;
}

const char* to_string(ExternalField::Kind kind) {
  switch (kind) {
    case ExternalField::Kind::none: return "none";
    case ExternalField::Kind::uniform_electric: return "uniform-electric";
    case ExternalField::Kind::uniform_magnetic: return "uniform-magnetic";
    case ExternalField::Kind::coulomb_center: return "coulomb-center";
    case ExternalField::Kind::plane_wave: return "plane-wave";
  }
  return "none";
}

std::optional<ExternalField::Kind> external_kind_from_string(const std::string& s) {
  using K = ExternalField::Kind;
  for (K k : {K::none, K::uniform_electric, K::uniform_magnetic, K::coulomb_center,
              K::plane_wave})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

}  // namespace mcced
