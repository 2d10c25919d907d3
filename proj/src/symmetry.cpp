#include "mcced/symmetry.hpp"

#include <algorithm>
#include <sstream>

namespace mcced {

const char* to_string(SymmetryOp op) {
  switch (op) {
    case SymmetryOp::Tt: return "Tt";
    case SymmetryOp::Tp: return "Tp";
    case SymmetryOp::C: return "C";
    case SymmetryOp::P: return "P";
    case SymmetryOp::CPT: return "CPT";
    case SymmetryOp::T: return "T";
  }
  return "T";
}

std::optional<SymmetryOp> symmetry_op_from_string(const std::string& s) {
  for (SymmetryOp op : kAllSymmetryOps)
    if (s == to_string(op)) return op;
  return std::nullopt;
}

namespace {

bool has_time_reversal(SymmetryOp op) {
  return op == SymmetryOp::Tt || op == SymmetryOp::T || op == SymmetryOp::CPT;
}
bool has_p_flip(SymmetryOp op) {
  return op == SymmetryOp::Tp || op == SymmetryOp::T || op == SymmetryOp::CPT;
}
bool has_parity(SymmetryOp op) { return op == SymmetryOp::P || op == SymmetryOp::CPT; }
bool has_charge(SymmetryOp op) { return op == SymmetryOp::C || op == SymmetryOp::CPT; }

FourVector negate_space(FourVector v) {
  v.tail<3>() *= -1.0;
  return v;
}

Worldline reflect_space(const Worldline& w) {
  std::vector<WorldlineSample> out = w.samples();
  for (WorldlineSample& s : out) {
    s.position = negate_space(s.position);
    s.velocity = negate_space(s.velocity);
    s.acceleration = negate_space(s.acceleration);
  }
  return Worldline(std::move(out));
}

CedBoundary swap_in_out(CedBoundary b) {
  if (b == CedBoundary::sommerfeld) return CedBoundary::outgoing;
  if (b == CedBoundary::outgoing) return CedBoundary::sommerfeld;
  return b;
}

IntegratorMethod swap_branch(IntegratorMethod m) {
  if (m == IntegratorMethod::nbody_retarded) return IntegratorMethod::nbody_advanced;
  if (m == IntegratorMethod::nbody_advanced) return IntegratorMethod::nbody_retarded;
  return m;
}

}  // namespace

Worldline apply_symmetry(const Worldline& w, SymmetryOp op) {
  Worldline out = w;
  if (out.empty()) return out;
  if (has_time_reversal(op)) out = out.time_reversed();
  if (has_parity(op)) out = reflect_space(out);
  return out;
}

Scenario apply_symmetry(const Scenario& s, SymmetryOp op) {
  Scenario out = s;
  if (has_time_reversal(op)) {
    for (Particle& p : out.particles) p.velocity = -p.velocity;
    out.external = time_reversed(out.external);
    out.topology.free_field = time_reversed(out.topology.free_field);
    out.topology.boundary = swap_in_out(out.topology.boundary);
  }
  if (has_p_flip(op)) {
    out.topology.p = -out.topology.p;
    out.integrator.method = swap_branch(out.integrator.method);
  }
  if (has_parity(op)) {
    for (Particle& p : out.particles) {
      p.position = -p.position;
      p.velocity = -p.velocity;
      p.acceleration = -p.acceleration;
    }
    out.external = space_reflected(out.external);
    out.topology.free_field = space_reflected(out.topology.free_field);
  }
  if (has_charge(op)) {
    for (Particle& p : out.particles) p.charge = -p.charge;
    out.external = charge_conjugated(out.external);
    out.topology.free_field = charge_conjugated(out.topology.free_field);
  }
  for (Particle& p : out.particles) p.worldline = apply_symmetry(p.worldline, op);
  return out;
}

TrajectoryRecord apply_symmetry(const TrajectoryRecord& r, SymmetryOp op) {
  TrajectoryRecord out = has_time_reversal(op) ? time_reversed(r) : r;
  if (has_p_flip(op)) out.p = -out.p;
  if (has_parity(op)) {
    for (ParticleTrack& p : out.particles)
      for (RecordSample& s : p.samples) {
        s.position = negate_space(s.position);
        s.velocity = negate_space(s.velocity);
        s.acceleration = negate_space(s.acceleration);
        s.force_external = negate_space(s.force_external);
        s.force_interaction = negate_space(s.force_interaction);
        s.force_self = negate_space(s.force_self);
      }
  }
  if (has_charge(op))
    for (ParticleTrack& p : out.particles) p.charge = -p.charge;
  return out;
}

FourVector map_event(const FourVector& x, SymmetryOp op) {
  FourVector y = x;
  if (has_time_reversal(op)) y(0) = -y(0);
  if (has_parity(op)) y = negate_space(y);
  return y;
}

FieldTensor map_field(const FieldTensor& F, SymmetryOp op) {
  FieldTensor G = F;
  if (has_time_reversal(op)) G = time_reflect(G);
  if (has_parity(op)) G = space_reflect(G);
  return G;
}

const char* to_string(FieldFunctional f) {
  switch (f) {
    case FieldFunctional::rad_part: return "rad_part";
    case FieldFunctional::ret_part: return "ret_part";
    case FieldFunctional::adv_part: return "adv_part";
    case FieldFunctional::total: return "total";
    case FieldFunctional::tcrf: return "tcrf";
  }
  return "total";
}

std::optional<FieldFunctional> field_functional_from_string(const std::string& s) {
  using F = FieldFunctional;
  for (F f : {F::rad_part, F::ret_part, F::adv_part, F::total, F::tcrf})
    if (s == to_string(f)) return f;
  return std::nullopt;
}

FieldTensor evaluate_functional(FieldFunctional f, const Scenario& s, const FourVector& x,
                                std::size_t observer) {
  if (f == FieldFunctional::tcrf) return tcrf_field(s, x);
  const ObservedFieldDecomposition d = decompose_observed(s, observer, x);
  switch (f) {
    case FieldFunctional::rad_part: return d.rad_part;
    case FieldFunctional::ret_part: return d.ret_part;
    case FieldFunctional::adv_part: return d.adv_part;
    default: return d.total;
  }
}

namespace {

constexpr double kParityTolerance = 1e-9;
constexpr double kVanishingFloor = 1e-15;

EventParity compare_event(const FieldTensor& mapped, const FieldTensor& image,
                          const FourVector& x) {
  EventParity ev;
  ev.event = x;
  const double scale = std::max(mapped.max_abs(), image.max_abs());
  if (scale < kVanishingFloor) {
    ev.vanishing = true;
    return ev;
  }
  ev.deviation_even = max_abs_diff(mapped, image) / scale;
  ev.deviation_odd = max_abs_diff(mapped, FieldTensor(-image)) / scale;
  return ev;
}

}  // namespace

ParityReport measure_parity(FieldFunctional f, SymmetryOp op, const Scenario& s,
                            const std::vector<FourVector>& events, std::size_t observer) {
  ParityReport rep;
  const Scenario img = apply_symmetry(s, op);
  bool even = true, odd = true, any = false;
  for (const FourVector& x : events) {
    const FieldTensor orig = evaluate_functional(f, s, x, observer);
    const FieldTensor mapped = evaluate_functional(f, img, map_event(x, op), observer);
    EventParity ev = compare_event(mapped, map_field(orig, op), x);
    if (!ev.vanishing) {
      any = true;
      even = even && ev.deviation_even <= kParityTolerance;
      odd = odd && ev.deviation_odd <= kParityTolerance;
    }
    rep.events.push_back(ev);
  }
  std::ostringstream os;
  os << to_string(f) << " under " << to_string(op) << ": ";
  if (!any) {
    os << "functional vanishes at every sample event";
  } else if (even) {
    rep.parity = 1;
    os << "+1";
  } else if (odd) {
    rep.parity = -1;
    os << "-1";
  } else {
    os << "none;";
    for (const EventParity& ev : rep.events)
      os << " [t=" << ev.event(0) << " even=" << ev.deviation_even
         << " odd=" << ev.deviation_odd << (ev.vanishing ? " vanishing" : "") << "]";
  }
  rep.detail = os.str();
  return rep;
}

CedContrastReport ced_parity_contrast(const Scenario& s, const std::vector<FourVector>& events) {
  if (s.topology.mode != CouplingMode::ced)
    fail(ErrorCode::usage, "ced_parity_contrast requires a ced scenario");
  CedContrastReport rep;
  rep.degenerate = s.topology.free_field.kind == ExternalField::Kind::none;
  Scenario opp = apply_symmetry(s, SymmetryOp::Tt);
  opp.topology.p = -opp.topology.p;
  bool ok = true;
  for (const FourVector& x : events) {
    const FieldTensor rad = evaluate_functional(FieldFunctional::rad_part, s, x);
    const FieldTensor rad_opp =
        evaluate_functional(FieldFunctional::rad_part, opp, map_event(x, SymmetryOp::Tt));
    const FieldTensor image = time_reflect(rad);
    const double scale = std::max({rad_opp.max_abs(), image.max_abs(), kVanishingFloor});
    const double dev = max_abs_diff(rad_opp, image) / scale;
    rep.max_deviation = std::max(rep.max_deviation, dev);
    ok = ok && dev <= kParityTolerance;
  }
  rep.maps_to_opposite_p = ok && !events.empty();
  rep.fixed_p_parity = measure_parity(FieldFunctional::rad_part, SymmetryOp::Tt, s, events).parity;
  if (s.size() >= 2) {
    Scenario mc = s;
    mc.topology.mode = CouplingMode::mc_ced;
    mc.topology.free_field = ExternalField{};
    rep.mc_ced_rad_parity =
        measure_parity(FieldFunctional::rad_part, SymmetryOp::Tt, mc, events).parity;
  }
  std::ostringstream os;
  os << "ced rad under Tt ";
  os << (rep.maps_to_opposite_p ? "maps p -> -p" : "does not map p -> -p");
  os << " (max deviation " << rep.max_deviation << ")";
  if (rep.degenerate) os << "; degenerate: no declared free field";
  os << "; fixed-p parity "
     << (rep.fixed_p_parity ? std::to_string(*rep.fixed_p_parity) : std::string("none"));
  if (rep.mc_ced_rad_parity)
    os << "; mc-ced rad parity " << *rep.mc_ced_rad_parity;
  rep.detail = os.str();
  return rep;
}

}  // namespace mcced
