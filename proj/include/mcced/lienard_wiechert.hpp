#pragma once

// Retarded and advanced Liénard–Wiechert fields of point charges, in
// Heaviside–Lorentz units (Coulomb field e r̂ / 4πr²).

#include <numbers>

#include "mcced/spacetime.hpp"

namespace mcced {

inline constexpr double kInvFourPi = 1.0 / (4.0 * std::numbers::pi);

/// Antisymmetric field tensor stored as its electric and magnetic parts.
template <typename Scalar>
struct FieldTensorT {
  Vec3T<Scalar> E = Vec3T<Scalar>::Zero();
  Vec3T<Scalar> B = Vec3T<Scalar>::Zero();

  static FieldTensorT zero() { return {}; }

  FieldTensorT& operator+=(const FieldTensorT& o) {
    E += o.E;
    B += o.B;
    return *this;
  }
  FieldTensorT& operator-=(const FieldTensorT& o) {
    E -= o.E;
    B -= o.B;
    return *this;
  }
  FieldTensorT& operator*=(Scalar s) {
    E *= s;
    B *= s;
    return *this;
  }

  /// Largest absolute component.
  Scalar max_abs() const {
    return std::max(E.cwiseAbs().maxCoeff(), B.cwiseAbs().maxCoeff());
  }

  /// Covariant components F_{μν} = ∂_μ A_ν − ∂_ν A_μ.
  Eigen::Matrix<Scalar, 4, 4> covariant() const {
    Eigen::Matrix<Scalar, 4, 4> F = Eigen::Matrix<Scalar, 4, 4>::Zero();
    for (int i = 0; i < 3; ++i) {
      F(0, i + 1) = E(i);
      F(i + 1, 0) = -E(i);
    }
    F(1, 2) = -B(2);
    F(2, 1) = B(2);
    F(1, 3) = B(1);
    F(3, 1) = -B(1);
    F(2, 3) = -B(0);
    F(3, 2) = B(0);
    return F;
  }
};

template <typename Scalar>
FieldTensorT<Scalar> operator+(FieldTensorT<Scalar> a, const FieldTensorT<Scalar>& b) {
  return a += b;
}
template <typename Scalar>
FieldTensorT<Scalar> operator-(FieldTensorT<Scalar> a, const FieldTensorT<Scalar>& b) {
  return a -= b;
}
template <typename Scalar>
FieldTensorT<Scalar> operator-(FieldTensorT<Scalar> a) {
  return a *= Scalar(-1);
}
template <typename Scalar>
FieldTensorT<Scalar> operator*(Scalar s, FieldTensorT<Scalar> a) {
  return a *= s;
}

/// Largest componentwise difference.
template <typename Scalar>
Scalar max_abs_diff(const FieldTensorT<Scalar>& a, const FieldTensorT<Scalar>& b) {
  return (a - b).max_abs();
}

/// Lorentz four-force e F^{μν} u_ν = e (E·u, u⁰E + u×B).
template <typename Scalar>
FourVectorT<Scalar> lorentz_force(const FieldTensorT<Scalar>& F,
                                  const FourVectorT<Scalar>& u, Scalar charge) {
  const Vec3T<Scalar> us = u.template tail<3>();
  return charge * make_four<Scalar>(F.E.dot(us), u(0) * F.E + us.cross(F.B));
}

/// Image of a field value under t -> -t (E even, B odd).
template <typename Scalar>
FieldTensorT<Scalar> time_reflect(const FieldTensorT<Scalar>& F) {
  return {F.E, -F.B};
}

/// Image of a field value under x -> -x (E odd, B even).
template <typename Scalar>
FieldTensorT<Scalar> space_reflect(const FieldTensorT<Scalar>& F) {
  return {-F.E, F.B};
}

using FieldTensor = FieldTensorT<double>;

FieldTensor external_field_at(const ExternalField& field, const FourVector& x,
                              bool from_above = true);

enum class LightConeBranch { retarded, advanced };

const char* to_string(LightConeBranch b);

struct LightConeOptions {
  /// Largest admissible |x⁰ − t*|.
  double horizon = 1e6;
};

/// Coordinate time t* of the worldline point on the past (retarded) or future
/// (advanced) light cone of x.
double light_cone_time(const Worldline& w, const FourVector& x, LightConeBranch branch,
                       const LightConeOptions& opts = {});

/// Contravariant potential A^μ = (φ, A) in Lorenz gauge.
FourVector lw_potential(const Worldline& w, double charge, const FourVector& x,
                        LightConeBranch branch, const LightConeOptions& opts = {});

/// Velocity (∝1/R²) and acceleration (∝1/R) parts of the field.
struct FieldParts {
  FieldTensor velocity;
  FieldTensor radiation;
  double source_time = 0.0;

  FieldTensor total() const { return velocity + radiation; }
};

FieldParts lw_field_parts(const Worldline& w, double charge, const FourVector& x,
                          LightConeBranch branch, const LightConeOptions& opts = {});

FieldTensor lw_field(const Worldline& w, double charge, const FourVector& x,
                     LightConeBranch branch, const LightConeOptions& opts = {});

/// (F_ret + F_adv) / 2.
FieldTensor field_half_sum(const Worldline& w, double charge, const FourVector& x,
                           const LightConeOptions& opts = {});

/// (F_ret − F_adv) / 2, the field that stays finite on the worldline.
FieldTensor field_half_difference(const Worldline& w, double charge, const FourVector& x,
                                  const LightConeOptions& opts = {});

struct PointSplitOptions {
  /// Initial spatial offset; <= 0 selects 1e-3 times the local curvature radius.
  double initial_offset = 0.0;
  /// Allowed disagreement between the two Richardson levels, relative.
  double agreement = 0.05;
};

struct PointSplitDiagnostics {
  double offset = 0.0;
  FieldTensor level[3];      // direction-averaged estimates at ε, ε/2, ε/4
  FieldTensor richardson[2]; // ε² eliminated from (ε, ε/2) and (ε/2, ε/4)
};

/// Limit of (F_ret − F_adv)/2 on the worldline at coordinate time t by point
/// splitting: ±offset averaging along three rest-frame directions orthogonal
/// to u, then Richardson extrapolation over ε, ε/2, ε/4.
FieldTensor minus_field_on_worldline(const Worldline& w, double charge, double t,
                                     const PointSplitOptions& opts = {},
                                     PointSplitDiagnostics* diag = nullptr);

/// Four-force e u^ν F⁽⁻⁾_μν of a charge's own minus field at proper time tau.
FourVector self_minus_force(const Worldline& w, double charge, double tau,
                            const PointSplitOptions& opts = {});

/// Same, at coordinate time t.
FourVector self_minus_force_at_time(const Worldline& w, double charge, double t,
                                    const PointSplitOptions& opts = {});

/// Abraham–Lorentz–Dirac vector (2/3)(e²/4π)(ȧ + (a·a)u).
FourVector ald_force(double charge, const FourVector& u, const FourVector& a,
                     const FourVector& a_dot);

/// Proper time along the worldline at coordinate time t.
double proper_time_at(const Worldline& w, double t);

/// Coordinate time at which the worldline reaches proper time tau.
double time_at_proper_time(const Worldline& w, double tau);

}  // namespace mcced
