#pragma once

// Equations of motion with radiation reaction.
//
// Sign conventions: signature (+,-,-,-), so a·a <= 0 for the (spacelike)
// four-acceleration. The radiation reaction four-force is
//   Γ = m τ0 (ȧ + (a·a) u),  τ0 = (2/3) e² / (4π m),
// and the radiated power R = −(2/3)(e²/4π) a·a is non-negative.

#include <string>
#include <vector>

#include "mcced/coupling.hpp"
#include "mcced/lienard_wiechert.hpp"
#include "mcced/scenario.hpp"

namespace mcced {

/// Characteristic radiation-reaction time (2/3) e² / (4π m).
double tau0(double charge, double mass);

/// Radiated power −(2/3)(e²/4π)(a·a) >= 0.
double larmor_power(const FourVector& u, const FourVector& a, double charge);

struct RecordSample {
  double tau = 0.0;
  FourVector position = FourVector::Zero();
  FourVector velocity = FourVector::UnitX();
  FourVector acceleration = FourVector::Zero();
  double larmor = 0.0;
  FourVector force_external = FourVector::Zero();
  FourVector force_interaction = FourVector::Zero();
  FourVector force_self = FourVector::Zero();

  double t() const { return position(0); }
};

struct ParticleTrack {
  double charge = 1.0;
  double mass = 1.0;
  std::vector<RecordSample> samples;

  Worldline worldline() const;
};

struct TrajectoryRecord {
  std::string method;
  double p = 1.0;
  double dt = 0.0;
  std::vector<ParticleTrack> particles;
  /// Free-form run notes (renormalization drift, truncation, mapping).
  std::vector<std::string> notes;

  std::size_t steps() const { return particles.empty() ? 0 : particles.front().samples.size(); }
  std::vector<Worldline> worldlines() const;
};

/// Time-reversed record: t -> −t, spatial velocities flipped, order reversed.
TrajectoryRecord time_reversed(const TrajectoryRecord& r);

struct EnergyLedger {
  double kinetic_initial = 0.0;
  double kinetic_final = 0.0;
  double radiated = 0.0;
  double potential_initial = 0.0;
  double potential_final = 0.0;
  double external_work = 0.0;
  /// ΔKE + E_rad + ΔPE − W_ext.
  double closure_residual = 0.0;

  double delta_kinetic() const { return kinetic_final - kinetic_initial; }
  double delta_potential() const { return potential_final - potential_initial; }
};

EnergyLedger energy_ledger(const TrajectoryRecord& r);

/// K_μ = e u^ν Σ_{j≠k} F_ret,μν⁽ʲ⁾ + e u^ν F_ext,μν − R u_μ on particle k's
/// stored worldline at proper time tau.
FourVector ld_kernel(const Scenario& s, std::size_t k, double tau);

struct ConvergenceReport {
  int iterations = 0;
  std::vector<double> residuals;
  bool converged = false;
};

/// Integro-differential Lorentz–Dirac equation for a single particle in an
/// external field, solved by waveform iteration.
TrajectoryRecord integrate_ld_integro(const Scenario& s, ConvergenceReport* report = nullptr);

struct RunawayReport {
  bool runaway = false;
  bool truncated = false;
  double growth_rate = 0.0;      // fitted d ln|a| / dτ
  double expected_rate = 0.0;    // 1/τ0
  double truncated_at = 0.0;     // coordinate time of truncation
  std::string detail;
};

/// Local third-order Lorentz–Dirac equation m a = F + m τ0 (ȧ + (a·a) u)
/// integrated forward (or backward from a terminal acceleration F/m).
TrajectoryRecord integrate_ld_local(const Scenario& s, RunawayReport* report = nullptr);

/// Reduction-of-order (Landau–Lifshitz) self-force for a single particle.
TrajectoryRecord integrate_landau_lifshitz(const Scenario& s);

/// p = +1 delay dynamics: neighbours act through their retarded fields,
/// evaluated on the stored histories.
TrajectoryRecord integrate_retarded_nbody(const Scenario& s);

/// p = −1 dynamics via the time-reversal mapping. The scenario's particle data
/// is the state at t = 0, which is the end of the run; the record spans
/// [−t_end, 0].
TrajectoryRecord integrate_advanced_nbody(const Scenario& s);

/// Direct p = −1 solver for short windows: forward integration from the
/// initial data with neighbours' advanced fields taken from the previous
/// waveform iterate. Post-history is inertial.
TrajectoryRecord integrate_advanced_nbody_direct(const Scenario& s,
                                                 ConvergenceReport* report = nullptr);

/// Dispatches on s.integrator.method.
TrajectoryRecord integrate(const Scenario& s, RunawayReport* runaway = nullptr,
                           ConvergenceReport* convergence = nullptr);

struct AsymptoticReport {
  bool pass = true;
  double max_acceleration = 0.0;
  double growth_rate = 0.0;  // fitted d ln|a| / dt over the window
  std::string detail;
};

AsymptoticReport asymptotic_check(const TrajectoryRecord& r, double window,
                                  double tolerance = 1e-3);

struct MotionResidual {
  double max_relative = 0.0;
  std::size_t particle = 0;
  std::size_t sample = 0;
};

/// Residual of the scenario's p-equations of motion along a recorded
/// trajectory: |m a − F| / max|F| over interior samples, with neighbours'
/// fields weighted (1+p)/2 retarded + (1−p)/2 advanced and the self term
/// p times the reduction-of-order radiation reaction.
MotionResidual motion_residual(const Scenario& s, const TrajectoryRecord& r,
                               std::size_t skip = 2);

enum class Regime { pointer_basis_classical, quantum_superposition, intermediate };

const char* to_string(Regime r);

/// Compares a correlation length with a wavelength (both in cm).
Regime classical_threshold(double correlation_length, double wavelength);

}  // namespace mcced
