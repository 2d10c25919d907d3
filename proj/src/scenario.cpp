#include "mcced/scenario.hpp"

#include <cmath>
#include <string>

namespace mcced {

void IntegratorConfig::validate() const {
  if (!(dt > 0.0)) fail(ErrorCode::domain, "integrator dt must be > 0");
  if (!std::isfinite(t_end)) fail(ErrorCode::domain, "integrator t_end must be finite");
  if (!(future_horizon >= 20.0))
    fail(ErrorCode::domain, "integrator future_horizon must be >= 20 (kernel truncation e^-20)");
  if (waveform_iterations < 1) fail(ErrorCode::domain, "waveform_iterations must be >= 1");
  if (!(tolerance > 0.0)) fail(ErrorCode::domain, "integrator tolerance must be > 0");
}

Worldline Scenario::worldline(std::size_t k) const {
  if (k >= particles.size()) fail(ErrorCode::usage, "particle index out of range");
  const Particle& p = particles[k];
  if (!p.worldline.empty()) return p.worldline;
  return Worldline::inertial(p.position, p.velocity, 0.0);
}

void Scenario::validate() const {
  if (topology.p == 0.0 || !std::isfinite(topology.p))
    fail(ErrorCode::domain, "p must be a nonzero c-number (p != 0)");
  if (topology.mode == CouplingMode::mc_ced) {
    if (particles.size() < 2)
      fail(ErrorCode::domain, "mc-ced requires N >= 2 particles");
    if (topology.free_field.kind != ExternalField::Kind::none)
      fail(ErrorCode::domain,
           "mc-ced admits no free field: free radiation fields have no measurement color description");
  } else {
    if (particles.empty()) fail(ErrorCode::domain, "scenario needs at least one particle");
    if (topology.free_field.kind != ExternalField::Kind::none &&
        topology.free_field.kind != ExternalField::Kind::plane_wave)
      fail(ErrorCode::domain, "ced free field must be plane-wave or none");
    topology.free_field.validate();
  }
  for (std::size_t k = 0; k < particles.size(); ++k) {
    const Particle& p = particles[k];
    const std::string tag = "particle " + std::to_string(k) + ": ";
    if (!(p.mass > 0.0)) fail(ErrorCode::domain, tag + "mass must be > 0");
    if (!std::isfinite(p.charge)) fail(ErrorCode::domain, tag + "charge must be finite");
    if (!p.position.allFinite() || !p.velocity.allFinite() || !p.acceleration.allFinite())
      fail(ErrorCode::domain, tag + "initial data must be finite");
    if (!(p.velocity.norm() < 1.0)) fail(ErrorCode::domain, tag + "|velocity| must be < 1");
  }
  external.validate();
  integrator.validate();
}

const char* to_string(CouplingMode m) { return m == CouplingMode::mc_ced ? "mc-ced" : "ced"; }

const char* to_string(CedBoundary b) {
  switch (b) {
    case CedBoundary::sommerfeld: return "sommerfeld";
    case CedBoundary::outgoing: return "outgoing";
    case CedBoundary::free_field: return "free-field";
  }
  return "sommerfeld";
}

const char* to_string(IntegratorMethod m) {
  switch (m) {
    case IntegratorMethod::ld_integro: return "ld-integro";
    case IntegratorMethod::ld_local: return "ld-local";
    case IntegratorMethod::landau_lifshitz: return "landau-lifshitz";
    case IntegratorMethod::nbody_retarded: return "nbody-retarded";
    case IntegratorMethod::nbody_advanced: return "nbody-advanced";
  }
  return "nbody-retarded";
}

const char* to_string(SelfForceModel m) {
  switch (m) {
    case SelfForceModel::landau_lifshitz: return "landau-lifshitz";
    case SelfForceModel::minus_field: return "minus-field";
    case SelfForceModel::none: return "none";
  }
  return "none";
}

std::optional<CouplingMode> coupling_mode_from_string(const std::string& s) {
  if (s == "mc-ced") return CouplingMode::mc_ced;
  if (s == "ced") return CouplingMode::ced;
  return std::nullopt;
}

std::optional<CedBoundary> ced_boundary_from_string(const std::string& s) {
  if (s == "sommerfeld") return CedBoundary::sommerfeld;
  if (s == "outgoing") return CedBoundary::outgoing;
  if (s == "free-field") return CedBoundary::free_field;
  return std::nullopt;
}

std::optional<IntegratorMethod> integrator_method_from_string(const std::string& s) {
  using M = IntegratorMethod;
  for (M m : {M::ld_integro, M::ld_local, M::landau_lifshitz, M::nbody_retarded, M::nbody_advanced})
    if (s == to_string(m)) return m;
  return std::nullopt;
}

std::optional<SelfForceModel> self_force_from_string(const std::string& s) {
  using M = SelfForceModel;
  for (M m : {M::landau_lifshitz, M::minus_field, M::none})
    if (s == to_string(m)) return m;
  return std::nullopt;
}

}  // namespace mcced
