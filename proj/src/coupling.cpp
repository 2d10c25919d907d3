#include "mcced/coupling.hpp"

#include <cmath>

namespace mcced {

namespace {

const Worldline& worldline_ref(const Scenario& s, std::size_t j, Worldline& storage) {
  const Particle& p = s.particles.at(j);
  if (!p.worldline.empty()) return p.worldline;
  storage = Worldline::inertial(p.position, p.velocity, 0.0);
  return storage;
}

}  // namespace

bool on_worldline(const Worldline& w, const FourVector& x) {
  Vec3 r, v, a;
  w.coordinate_state(x(0), r, v, a);
  const double scale = 1.0 + std::abs(x(0)) + spatial(x).norm();
  return (spatial(x) - r).norm() <= 1e-10 * scale;
}

SourceFields source_fields(const Scenario& s, std::size_t j, const FourVector& x,
                           bool renormalize_self) {
  const Particle& p = s.particles.at(j);
  Worldline storage;
  const Worldline& w = worldline_ref(s, j, storage);
  SourceFields out;
  if (on_worldline(w, x)) {
    if (!renormalize_self)
      fail(ErrorCode::singularity, "field point lies on the worldline of particle " +
                                       std::to_string(j));
    out.on_worldline = true;
    out.half_difference = minus_field_on_worldline(w, p.charge, x(0));
    return out;
  }
  const FieldTensor ret = lw_field(w, p.charge, x, LightConeBranch::retarded);
  const FieldTensor adv = lw_field(w, p.charge, x, LightConeBranch::advanced);
  out.half_sum = 0.5 * (ret + adv);
  out.half_difference = 0.5 * (ret - adv);
  return out;
}

FieldTensor free_field_at(const Scenario& s, const FourVector& x) {
  if (s.topology.mode == CouplingMode::mc_ced) return {};
  FieldTensor F = external_field_at(s.topology.free_field, x);
  if (s.topology.boundary == CedBoundary::sommerfeld) F += tcrf_field(s, x);
  if (s.topology.boundary == CedBoundary::outgoing) F -= tcrf_field(s, x);
  return F;
}

ObservedFieldDecomposition decompose_observed(const Scenario& s, std::size_t k,
                                              const FourVector& x) {
  if (k >= s.size()) fail(ErrorCode::usage, "particle index out of range");
  const double p = s.topology.p;
  const double w_ret = 0.5 * (1.0 + p);
  const double w_adv = 0.5 * (1.0 - p);
  ObservedFieldDecomposition d;
  d.external_part = external_field_at(s.external, x);

  if (s.topology.mode == CouplingMode::mc_ced) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (j == k) continue;
      const SourceFields f = source_fields(s, j, x, false);
      d.ret_part += w_ret * f.retarded();
      d.adv_part += w_adv * f.advanced();
    }
    d.rad_part = p * source_fields(s, k, x, true).half_difference;
  } else {
    FieldTensor minus_total;
    for (std::size_t j = 0; j < s.size(); ++j) {
      const SourceFields f = source_fields(s, j, x, j == k);
      d.ret_part += w_ret * f.retarded();
      d.adv_part += w_adv * f.advanced();
      minus_total += f.half_difference;
    }
    FieldTensor free = external_field_at(s.topology.free_field, x);
    if (s.topology.boundary == CedBoundary::sommerfeld) free += minus_total;
    if (s.topology.boundary == CedBoundary::outgoing) free -= minus_total;
    d.rad_part = free - p * minus_total;
  }
  d.total = d.ret_part + d.adv_part + d.rad_part + d.external_part;
  return d;
}

FieldTensor observed_field(const Scenario& s, std::size_t k, const FourVector& x) {
  return decompose_observed(s, k, x).total;
}

FieldTensor tcrf_field(const Scenario& s, const FourVector& x) {
  if (s.topology.mode == CouplingMode::mc_ced && s.size() < 2)
    fail(ErrorCode::domain, "tcrf_field: mc-ced requires N >= 2 particles");
  if (s.particles.empty()) fail(ErrorCode::domain, "tcrf_field: no particles");
  FieldTensor F;
  for (std::size_t j = 0; j < s.size(); ++j) F += source_fields(s, j, x, true).half_difference;
  return F;
}

}  // namespace mcced
