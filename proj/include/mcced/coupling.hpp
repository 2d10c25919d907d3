#pragma once

// Field observed by each particle under the measurement-color (mc-ced) and
// standard (ced) coupling topologies.
//
// mc-ced, particle k:
//   ret = (1+p)/2 Σ_{j≠k} F_ret⁽ʲ⁾
//   adv = (1−p)/2 Σ_{j≠k} F_adv⁽ʲ⁾
//   rad = p F⁽ᵏ⁾⁽⁻⁾
// which equals Σ_{j≠k} F⁽ʲ⁾⁽⁺⁾ + p Σ_j F⁽ʲ⁾⁽⁻⁾ (the TCRF form). The per-color
// solution A⁽ᵏ⁾ = A⁽ᵏ⁾⁽⁺⁾ + p A^TCRF/(N−1) is never assembled explicitly.
//
// ced: sums run over all particles and
//   rad = F⁽⁰⁾ − p Σ_j F⁽ʲ⁾⁽⁻⁾,
// with F⁽⁰⁾ built from the declared field according to the CedBoundary.
// A particle's own half-sum field is mass-renormalized away when the field
// point lies on its worldline; its own minus field is then taken as the
// point-split limit.

#include "mcced/lienard_wiechert.hpp"
#include "mcced/scenario.hpp"

namespace mcced {

struct ObservedFieldDecomposition {
  FieldTensor ret_part;
  FieldTensor adv_part;
  FieldTensor rad_part;
  FieldTensor external_part;
  FieldTensor total;
};

/// F⁽⁺⁾ and F⁽⁻⁾ of one source at x.
struct SourceFields {
  FieldTensor half_sum;
  FieldTensor half_difference;
  bool on_worldline = false;

  FieldTensor retarded() const { return half_sum + half_difference; }
  FieldTensor advanced() const { return half_sum - half_difference; }
};

/// Distance below which a field point counts as lying on a worldline.
bool on_worldline(const Worldline& w, const FourVector& x);

/// Fields of particle j at x. With `renormalize_self` set and x on the
/// worldline, F⁽⁺⁾ is dropped and F⁽⁻⁾ is the point-split limit; otherwise an
/// on-worldline point is a singularity error.
SourceFields source_fields(const Scenario& s, std::size_t j, const FourVector& x,
                           bool renormalize_self);

/// Declared free field F⁽⁰⁾ at x for ced scenarios (zero for mc-ced).
FieldTensor free_field_at(const Scenario& s, const FourVector& x);

ObservedFieldDecomposition decompose_observed(const Scenario& s, std::size_t k,
                                              const FourVector& x);

FieldTensor observed_field(const Scenario& s, std::size_t k, const FourVector& x);

/// Total coupled radiation field Σ_k F⁽ᵏ⁾⁽⁻⁾.
FieldTensor tcrf_field(const Scenario& s, const FourVector& x);

}  // namespace mcced
