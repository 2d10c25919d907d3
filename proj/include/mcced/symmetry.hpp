#pragma once

// Discrete symmetry operators on scenarios, trajectories and field values.
//
//   Tt   t -> −t: velocities flip, histories reverse, E even / B odd
//   Tp   p -> −p
//   C    e -> −e for every charge and external source
//   P    x -> −x: E odd / B even
//   T    Tt∘Tp
//   CPT  C∘P∘T

#include <optional>
#include <string>
#include <vector>

#include "mcced/coupling.hpp"
#include "mcced/dynamics.hpp"
#include "mcced/scenario.hpp"

namespace mcced {

enum class SymmetryOp { Tt, Tp, C, P, CPT, T };

const char* to_string(SymmetryOp op);
std::optional<SymmetryOp> symmetry_op_from_string(const std::string& s);
inline constexpr SymmetryOp kAllSymmetryOps[] = {SymmetryOp::Tt, SymmetryOp::Tp, SymmetryOp::C,
                                                 SymmetryOp::P,  SymmetryOp::CPT, SymmetryOp::T};

Worldline apply_symmetry(const Worldline& w, SymmetryOp op);
Scenario apply_symmetry(const Scenario& s, SymmetryOp op);
TrajectoryRecord apply_symmetry(const TrajectoryRecord& r, SymmetryOp op);

/// Image of a spacetime event.
FourVector map_event(const FourVector& x, SymmetryOp op);

/// Image of a field value at the mapped event, before any intrinsic parity.
FieldTensor map_field(const FieldTensor& F, SymmetryOp op);

enum class FieldFunctional { rad_part, ret_part, adv_part, total, tcrf };

const char* to_string(FieldFunctional f);
std::optional<FieldFunctional> field_functional_from_string(const std::string& s);

/// Value of a named functional at x, observed by particle `observer`.
FieldTensor evaluate_functional(FieldFunctional f, const Scenario& s, const FourVector& x,
                                std::size_t observer = 0);

struct EventParity {
  FourVector event;
  double deviation_even = 0.0;  // relative |F' − image(F)|
  double deviation_odd = 0.0;   // relative |F' + image(F)|
  bool vanishing = false;       // both values below the tolerance floor
};

struct ParityReport {
  /// +1, −1, or empty ("none").
  std::optional<int> parity;
  std::vector<EventParity> events;
  std::string detail;
};

/// Measures the parity of a functional under op: F evaluated on the image
/// scenario at the image event is compared with the transformed original
/// value, within relative tolerance 1e−9.
ParityReport measure_parity(FieldFunctional f, SymmetryOp op, const Scenario& s,
                            const std::vector<FourVector>& events, std::size_t observer = 0);

struct CedContrastReport {
  /// No declared free field: the rad part is built only from source fields.
  bool degenerate = false;
  /// Tt image of rad at p equals the image scenario's rad at −p.
  bool maps_to_opposite_p = false;
  double max_deviation = 0.0;
  /// Parity of CED rad under Tt at fixed p (generally none).
  std::optional<int> fixed_p_parity;
  /// Parity of the MC-CED rad part of the same particles under Tt (N >= 2).
  std::optional<int> mc_ced_rad_parity;
  std::string detail;
};

CedContrastReport ced_parity_contrast(const Scenario& s, const std::vector<FourVector>& events);

}  // namespace mcced
