#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mcced/spacetime.hpp"

namespace mcced {

enum class CouplingMode { mc_ced, ced };

/// How the standard theory fixes its free radiation field.
///  - sommerfeld: the declared free field is the incoming field F_in; the
///    total free field is F⁽⁰⁾ = F_in + Σ F⁽⁻⁾ (no incoming radiation when none).
///  - outgoing: the declared free field is F_out; F⁽⁰⁾ = F_out − Σ F⁽⁻⁾.
///  - free_field: the declared free field is F⁽⁰⁾ itself.
enum class CedBoundary { sommerfeld, outgoing, free_field };

struct CouplingTopology {
  CouplingMode mode = CouplingMode::mc_ced;
  double p = 1.0;
  ExternalField free_field;  // ced only
  CedBoundary boundary = CedBoundary::sommerfeld;
};

enum class IntegratorMethod { ld_integro, ld_local, landau_lifshitz, nbody_retarded, nbody_advanced };

/// Self-force model used inside N-body runs.
enum class SelfForceModel { landau_lifshitz, minus_field, none };

struct IntegratorConfig {
  double dt = 0.01;
  double t_end = 1.0;
  IntegratorMethod method = IntegratorMethod::nbody_retarded;
  double future_horizon = 20.0;  // in units of tau0
  int waveform_iterations = 50;
  double tolerance = 1e-10;
  SelfForceModel self_force = SelfForceModel::landau_lifshitz;
  /// ld-local only: integrate backward from t_end with a(t_end) = F/m.
  bool terminal_condition = false;

  void validate() const;
};

struct Particle {
  double charge = 1.0;
  double mass = 1.0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  /// Initial coordinate acceleration (only used by the local third-order form).
  Vec3 acceleration = Vec3::Zero();
  /// Sampled history; empty means inertial motion through the initial data.
  Worldline worldline;
};

struct Scenario {
  std::string name = "scenario";
  std::vector<Particle> particles;
  CouplingTopology topology;
  ExternalField external;
  IntegratorConfig integrator;

  std::size_t size() const { return particles.size(); }

  /// Worldline of particle k (inertial through the initial data if unset).
  Worldline worldline(std::size_t k) const;

  /// Checks every data-model invariant, throwing Error(domain|usage).
  void validate() const;
};

const char* to_string(CouplingMode m);
const char* to_string(CedBoundary b);
const char* to_string(IntegratorMethod m);
const char* to_string(SelfForceModel m);
std::optional<CouplingMode> coupling_mode_from_string(const std::string& s);
std::optional<CedBoundary> ced_boundary_from_string(const std::string& s);
std::optional<IntegratorMethod> integrator_method_from_string(const std::string& s);
std::optional<SelfForceModel> self_force_from_string(const std::string& s);

}  // namespace mcced
