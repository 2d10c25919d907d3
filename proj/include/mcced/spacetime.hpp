#pragma once

// Minkowski-space primitives, worldlines and external fields.
//
// Conventions: c = 1, metric signature (+,-,-,-), contravariant components
// (t, x, y, z) stored in Eigen fixed-size vectors.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <optional>
#include <vector>

#include "mcced/error.hpp"

namespace mcced {

template <typename Scalar>
using FourVectorT = Eigen::Matrix<Scalar, 4, 1>;
template <typename Scalar>
using Vec3T = Eigen::Matrix<Scalar, 3, 1>;

using FourVector = FourVectorT<double>;
using Vec3 = Vec3T<double>;

template <typename Derived1, typename Derived2>
auto minkowski_dot(const Eigen::MatrixBase<Derived1>& a,
                   const Eigen::MatrixBase<Derived2>& b) {
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived1, 4);
  EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived2, 4);
  return a(0) * b(0) - a(1) * b(1) - a(2) * b(2) - a(3) * b(3);
}

template <typename Derived>
auto spatial(const Eigen::MatrixBase<Derived>& v) {
  return v.template tail<3>();
}

template <typename Scalar>
FourVectorT<Scalar> make_four(Scalar t, const Vec3T<Scalar>& x) {
  FourVectorT<Scalar> out;
  out << t, x;
  return out;
}

/// Four-velocity (gamma, gamma v) of a 3-velocity with |v| < 1.
template <typename Scalar>
FourVectorT<Scalar> four_velocity(const Vec3T<Scalar>& v) {
  using std::sqrt;
  const Scalar gamma = Scalar(1) / sqrt(Scalar(1) - v.squaredNorm());
  return make_four<Scalar>(gamma, gamma * v);
}

/// Four-velocity from its spatial part u (time component sqrt(1 + u^2)).
template <typename Scalar>
FourVectorT<Scalar> four_velocity_from_spatial(const Vec3T<Scalar>& u) {
  using std::sqrt;
  return make_four<Scalar>(sqrt(Scalar(1) + u.squaredNorm()), u);
}

/// Pure Lorentz boost into the frame moving with 3-velocity `velocity`.
template <typename Scalar>
Eigen::Matrix<Scalar, 4, 4> boost_matrix(const Vec3T<Scalar>& velocity) {
  using std::sqrt;
  const Scalar v2 = velocity.squaredNorm();
  if (!(v2 < Scalar(1)))
    fail(ErrorCode::domain, "boost: |v| must be < 1");
  Eigen::Matrix<Scalar, 4, 4> L = Eigen::Matrix<Scalar, 4, 4>::Identity();
  if (v2 == Scalar(0)) return L;
  const Scalar gamma = Scalar(1) / sqrt(Scalar(1) - v2);
  L(0, 0) = gamma;
  L.template block<1, 3>(0, 1) = -gamma * velocity.transpose();
  L.template block<3, 1>(1, 0) = -gamma * velocity;
  L.template block<3, 3>(1, 1) +=
      (gamma - Scalar(1)) / v2 * velocity * velocity.transpose();
  return L;
}

template <typename Scalar>
FourVectorT<Scalar> boost(const Vec3T<Scalar>& velocity,
                          const FourVectorT<Scalar>& x) {
  return boost_matrix(velocity) * x;
}

bool is_finite(const FourVector& v);

/// One recorded point of a worldline.
struct WorldlineSample {
  double tau = 0.0;
  FourVector position = FourVector::Zero();
  FourVector velocity = FourVector::UnitX();
  FourVector acceleration = FourVector::Zero();
};

/// Kinematic state of a worldline at an instant of coordinate time.
struct WorldlineState {
  FourVector position;
  FourVector velocity;
  FourVector acceleration;
};

/// Builds the kinematic state from coordinate-time quantities:
/// position r, 3-velocity v = dr/dt and 3-acceleration dv/dt.
WorldlineState kinematic_state(double t, const Vec3& r, const Vec3& v,
                               const Vec3& dvdt);

/// Sampled trajectory, interpolated in coordinate time with cubic Hermite
/// polynomials over (position, velocity) and extended inertially before the
/// first and after the last sample.
class Worldline {
 public:
  Worldline() = default;
  explicit Worldline(std::vector<WorldlineSample> samples);

  /// Single sample at `t0` moving inertially for all time.
  static Worldline inertial(const Vec3& position, const Vec3& velocity,
                            double t0 = 0.0);

  /// Samples an analytic trajectory given as t -> (r, v, dv/dt) on a uniform
  /// grid covering [t0, t1]. Proper time is integrated with Simpson's rule.
  static Worldline from_function(
      const std::function<void(double, Vec3&, Vec3&, Vec3&)>& trajectory,
      double t0, double t1, double dt);

  bool empty() const { return samples_.empty(); }
  std::size_t size() const { return samples_.size(); }
  const std::vector<WorldlineSample>& samples() const { return samples_; }
  double first_time() const { return samples_.front().position(0); }
  double last_time() const { return samples_.back().position(0); }

  WorldlineState state_at(double t) const;

  /// Coordinate 3-velocity and 3-acceleration dv/dt at t, plus position.
  void coordinate_state(double t, Vec3& r, Vec3& v, Vec3& dvdt) const;

  /// Index i with t_i <= t < t_{i+1}, clamped to the sampled range.
  std::size_t interval_index(double t) const;

  void push_back(const WorldlineSample& sample);

  /// Time-reversed worldline: t -> -t, spatial velocity flipped.
  Worldline time_reversed() const;

 private:
  std::vector<WorldlineSample> samples_;
};

WorldlineState worldline_state_at(const Worldline& w, double t);

/// Classical external fields, also used to carry the free radiation field of
/// the standard theory when kind = plane_wave.
struct ExternalField {
  enum class Kind { none, uniform_electric, uniform_magnetic, coulomb_center, plane_wave };

  Kind kind = Kind::none;
  double amplitude = 0.0;          // |E|, |B|, source charge, or wave amplitude
  Vec3 direction = Vec3::UnitX();  // field direction, or propagation direction
  Vec3 polarization = Vec3::UnitY();  // plane wave E direction
  Vec3 center = Vec3::Zero();         // coulomb source location
  double omega = 1.0;                 // plane wave angular frequency
  double phase = 0.0;                 // plane wave phase

  // Temporal envelope: off before switch_on, on after switch_on + ramp,
  // C1 smoothstep in between. switch_on = -inf means always on.
  double switch_on = -std::numeric_limits<double>::infinity();
  double ramp = 0.0;

  /// Validates normalization and parameter ranges.
  void validate() const;

  /// Envelope value at time t. At a sharp switch the one-sided limit is taken
  /// from above when `from_above` is set.
  double envelope(double t, bool from_above = true) const;

  /// Declared discontinuity times of the envelope (empty unless ramp == 0).
  std::vector<double> switch_times() const;
};

/// Image under t -> -t: E even, B odd. Only always-on fields have an image.
ExternalField time_reversed(const ExternalField& f);
/// Image under x -> -x: E odd, B even.
ExternalField space_reflected(const ExternalField& f);
/// Image under e -> -e of the (charged) sources: all fields flip sign.
ExternalField charge_conjugated(const ExternalField& f);

const char* to_string(ExternalField::Kind kind);
std::optional<ExternalField::Kind> external_kind_from_string(const std::string& s);

}  // namespace mcced
