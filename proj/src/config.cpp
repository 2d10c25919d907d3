#include "mcced/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace mcced {

const char* to_string(RunKind k) {
  switch (k) {
    case RunKind::trajectory: return "trajectory";
    case RunKind::symmetry_suite: return "symmetry-suite";
    case RunKind::algebra_suite: return "algebra-suite";
  }
  return "trajectory";
}

namespace {

std::optional<RunKind> run_kind_from_string(const std::string& s) {
  for (RunKind k : {RunKind::trajectory, RunKind::symmetry_suite, RunKind::algebra_suite})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

class Reader {
 public:
  explicit Reader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void error(const YAML::Node& at, const std::string& msg) const {
    std::string where = origin_;
    if (at.IsDefined() && at.Mark().line >= 0)
      where += ":" + std::to_string(at.Mark().line + 1);
    fail(ErrorCode::parse, where + ": " + msg);
  }

  void expect_map(const YAML::Node& n, const std::string& section) const {
    if (!n.IsMap()) error(n, "section '" + section + "' must be a mapping");
  }

  void check_keys(const YAML::Node& n, const std::set<std::string>& allowed,
                  const std::string& section) const {
    for (const auto& kv : n) {
      const std::string key = kv.first.as<std::string>();
      if (!allowed.count(key)) {
        std::string list;
        for (const std::string& a : allowed) list += (list.empty() ? "" : ", ") + a;
        error(kv.first, "unknown key '" + key + "' in " + section + " (allowed: " + list + ")");
      }
    }
  }

  double number(const YAML::Node& n, const char* key, double fallback) const {
    const YAML::Node v = n[key];
    if (!v) return fallback;
    if (!v.IsScalar()) error(v, std::string(key) + " must be a number");
    const std::string text = v.Scalar();
    if (text == "inf" || text == ".inf") return INFINITY;
    if (text == "-inf" || text == "-.inf") return -INFINITY;
    try {
      std::size_t used = 0;
      const double x = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return x;
    } catch (const std::exception&) {
      error(v, std::string(key) + ": '" + text + "' is not a number");
    }
  }

  int integer(const YAML::Node& n, const char* key, int fallback) const {
    const double x = number(n, key, fallback);
    if (x != std::floor(x) || std::abs(x) > 1e9) error(n[key], std::string(key) + " must be an integer");
    return static_cast<int>(x);
  }

  bool boolean(const YAML::Node& n, const char* key, bool fallback) const {
    const YAML::Node v = n[key];
    if (!v) return fallback;
    try {
      return v.as<bool>();
    } catch (const YAML::Exception&) {
      error(v, std::string(key) + " must be true or false");
    }
  }

  std::string text(const YAML::Node& n, const char* key, const std::string& fallback) const {
    const YAML::Node v = n[key];
    if (!v) return fallback;
    if (!v.IsScalar()) error(v, std::string(key) + " must be a string");
    return v.Scalar();
  }

  Vec3 vec(const YAML::Node& n, const char* key, const Vec3& fallback) const {
    const YAML::Node v = n[key];
    if (!v) return fallback;
    if (!v.IsSequence() || v.size() != 3) error(v, std::string(key) + " must be a list of 3 numbers");
    Vec3 out;
    for (int i = 0; i < 3; ++i) {
      const YAML::Node item = v[i];
      if (!item.IsScalar()) error(item, std::string(key) + " entries must be numbers");
      try {
        std::size_t used = 0;
        out(i) = std::stod(item.Scalar(), &used);
        if (used != item.Scalar().size()) throw std::invalid_argument(item.Scalar());
      } catch (const std::exception&) {
        error(item, std::string(key) + ": '" + item.Scalar() + "' is not a number");
      }
    }
    return out;
  }

  /// Runs a validation step, re-raising its failure as a parse error at `at`.
  void anchored(const YAML::Node& at, const std::function<void()>& check) const {
    try {
      check();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::parse) throw;
      error(at, e.what());
    }
  }

 private:
  std::string origin_;
};

ExternalField parse_field(const Reader& rd, const YAML::Node& n, const std::string& section) {
  ExternalField f;
  if (!n) return f;
  rd.expect_map(n, section);
  rd.check_keys(n, {"kind", "amplitude", "direction", "polarization", "center", "omega", "phase",
                    "switch_on", "ramp"},
                section);
  const std::string kind = rd.text(n, "kind", "none");
  const auto k = external_kind_from_string(kind);
  if (!k)
    rd.error(n["kind"], "unknown field kind '" + kind +
                            "' (none, uniform-electric, uniform-magnetic, coulomb-center, plane-wave)");
  f.kind = *k;
  f.amplitude = rd.number(n, "amplitude", f.amplitude);
  f.direction = rd.vec(n, "direction", f.direction);
  f.polarization = rd.vec(n, "polarization", f.polarization);
  f.center = rd.vec(n, "center", f.center);
  f.omega = rd.number(n, "omega", f.omega);
  f.phase = rd.number(n, "phase", f.phase);
  f.switch_on = rd.number(n, "switch_on", f.switch_on);
  f.ramp = rd.number(n, "ramp", f.ramp);
  rd.anchored(n, [&] { f.validate(); });
  return f;
}

}  // namespace

ScenarioConfig parse_scenario_text(const std::string& text, const std::string& origin) {
  const Reader rd(origin);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    fail(ErrorCode::parse, origin + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root.IsMap()) fail(ErrorCode::parse, origin + ": top level must be a mapping");
  rd.check_keys(root, {"scenario", "particles", "topology", "external", "integrator", "output"},
                "top level");

  ScenarioConfig cfg;
  Scenario& s = cfg.scenario;

  if (const YAML::Node n = root["scenario"]) {
    rd.expect_map(n, "scenario");
    rd.check_keys(n, {"name", "description", "kind"}, "scenario");
    s.name = rd.text(n, "name", s.name);
    cfg.description = rd.text(n, "description", "");
    const std::string kind = rd.text(n, "kind", "trajectory");
    const auto k = run_kind_from_string(kind);
    if (!k)
      rd.error(n["kind"], "unknown scenario kind '" + kind +
                              "' (trajectory, symmetry-suite, algebra-suite)");
    cfg.kind = *k;
  }
  if (cfg.kind == RunKind::algebra_suite) {
    // Exact operator checks: no particles, fields or integrator.
    rd.check_keys(root, {"scenario", "output"}, "algebra-suite file");
    return cfg;
  }

  const YAML::Node parts = root["particles"];
  if (parts) {
    if (!parts.IsSequence()) rd.error(parts, "particles must be a list");
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const YAML::Node n = parts[i];
      const std::string section = "particles[" + std::to_string(i) + "]";
      rd.expect_map(n, section);
      rd.check_keys(n, {"charge", "mass", "position", "velocity", "acceleration"}, section);
      Particle p;
      p.charge = rd.number(n, "charge", p.charge);
      p.mass = rd.number(n, "mass", p.mass);
      p.position = rd.vec(n, "position", p.position);
      p.velocity = rd.vec(n, "velocity", p.velocity);
      p.acceleration = rd.vec(n, "acceleration", p.acceleration);
      if (!(p.mass > 0.0)) rd.error(n["mass"] ? n["mass"] : n, "mass must be > 0");
      if (!(p.velocity.norm() < 1.0))
        rd.error(n["velocity"] ? n["velocity"] : n, "|velocity| must be < 1 (c = 1)");
      s.particles.push_back(p);
    }
  }

  const YAML::Node topo = root["topology"];
  if (topo) {
    rd.expect_map(topo, "topology");
    rd.check_keys(topo, {"mode", "p", "boundary", "free_field"}, "topology");
    const std::string mode = rd.text(topo, "mode", "mc-ced");
    const auto m = coupling_mode_from_string(mode);
    if (!m) rd.error(topo["mode"], "unknown coupling mode '" + mode + "' (mc-ced, ced)");
    s.topology.mode = *m;
    s.topology.p = rd.number(topo, "p", s.topology.p);
    if (s.topology.p == 0.0 || !std::isfinite(s.topology.p))
      rd.error(topo["p"], "p ≠ 0 is a c-number");
    const std::string boundary = rd.text(topo, "boundary", "sommerfeld");
    const auto b = ced_boundary_from_string(boundary);
    if (!b)
      rd.error(topo["boundary"],
               "unknown boundary '" + boundary + "' (sommerfeld, outgoing, free-field)");
    s.topology.boundary = *b;
    s.topology.free_field = parse_field(rd, topo["free_field"], "topology.free_field");
  }
  const YAML::Node topo_at = topo ? topo : root;
  if (s.topology.mode == CouplingMode::mc_ced) {
    if (s.particles.size() < 2)
      rd.error(topo && topo["mode"] ? topo["mode"] : topo_at,
               "mc-ced requires N ≥ 2 particles (got " + std::to_string(s.particles.size()) + ")");
    if (s.topology.free_field.kind != ExternalField::Kind::none)
      rd.error(topo["free_field"],
               "mc-ced admits no free field: free radiation fields cannot be defined in terms of "
               "measurement color charge-fields");
  } else {
    if (s.particles.empty()) rd.error(parts ? parts : root, "ced requires at least one particle");
    if (s.topology.free_field.kind != ExternalField::Kind::none &&
        s.topology.free_field.kind != ExternalField::Kind::plane_wave)
      rd.error(topo["free_field"], "ced free field must be plane-wave or none");
  }

  s.external = parse_field(rd, root["external"], "external");

  if (const YAML::Node n = root["integrator"]) {
    rd.expect_map(n, "integrator");
    rd.check_keys(n, {"method", "dt", "t_end", "future_horizon", "waveform_iterations",
                      "tolerance", "self_force", "terminal_condition"},
                  "integrator");
    IntegratorConfig& ic = s.integrator;
    const std::string method = rd.text(n, "method", to_string(ic.method));
    const auto m = integrator_method_from_string(method);
    if (!m)
      rd.error(n["method"], "unknown method '" + method +
                                "' (ld-integro, ld-local, landau-lifshitz, nbody-retarded, "
                                "nbody-advanced)");
    ic.method = *m;
    ic.dt = rd.number(n, "dt", ic.dt);
    ic.t_end = rd.number(n, "t_end", ic.t_end);
    ic.future_horizon = rd.number(n, "future_horizon", ic.future_horizon);
    ic.waveform_iterations = rd.integer(n, "waveform_iterations", ic.waveform_iterations);
    ic.tolerance = rd.number(n, "tolerance", ic.tolerance);
    const std::string sf = rd.text(n, "self_force", to_string(ic.self_force));
    const auto f = self_force_from_string(sf);
    if (!f)
      rd.error(n["self_force"], "unknown self_force '" + sf +
                                    "' (landau-lifshitz, minus-field, none)");
    ic.self_force = *f;
    ic.terminal_condition = rd.boolean(n, "terminal_condition", ic.terminal_condition);
    rd.anchored(n, [&] { ic.validate(); });
    const bool single = ic.method == IntegratorMethod::ld_integro ||
                        ic.method == IntegratorMethod::ld_local;
    if (single && s.particles.size() != 1)
      rd.error(n["method"] ? n["method"] : n, method + " integrates exactly one particle");
    if (ic.method == IntegratorMethod::nbody_retarded && s.topology.p != 1.0)
      rd.error(n["method"] ? n["method"] : n, "nbody-retarded requires p = 1");
    if (ic.method == IntegratorMethod::nbody_advanced && s.topology.p != -1.0)
      rd.error(n["method"] ? n["method"] : n, "nbody-advanced requires p = -1");
  }

  if (const YAML::Node n = root["output"]) {
    rd.expect_map(n, "output");
    rd.check_keys(n, {"stride", "asymptotic_window"}, "output");
    cfg.output.stride = rd.integer(n, "stride", cfg.output.stride);
    if (cfg.output.stride < 1) rd.error(n["stride"], "stride must be >= 1");
    cfg.output.asymptotic_window = rd.number(n, "asymptotic_window", cfg.output.asymptotic_window);
  }

  rd.anchored(root, [&] { s.validate(); });
  return cfg;
}

ScenarioConfig parse_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot read scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path);
}

namespace {

nlohmann::ordered_json vec_json(const Vec3& v) { return {v(0), v(1), v(2)}; }

nlohmann::ordered_json field_json(const ExternalField& f) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(f.kind);
  if (f.kind == ExternalField::Kind::none) return j;
  j["amplitude"] = f.amplitude;
  j["direction"] = vec_json(f.direction);
  if (f.kind == ExternalField::Kind::plane_wave) {
    j["polarization"] = vec_json(f.polarization);
    j["omega"] = f.omega;
    j["phase"] = f.phase;
  }
  if (f.kind == ExternalField::Kind::coulomb_center) j["center"] = vec_json(f.center);
  if (std::isfinite(f.switch_on)) j["switch_on"] = f.switch_on;
  j["ramp"] = f.ramp;
  return j;
}

}  // namespace

nlohmann::ordered_json to_json(const ScenarioConfig& c) {
  const Scenario& s = c.scenario;
  nlohmann::ordered_json j;
  j["scenario"] = {{"name", s.name}, {"description", c.description}, {"kind", to_string(c.kind)}};
  if (c.kind == RunKind::algebra_suite) {
    j["output"] = {{"stride", c.output.stride}, {"asymptotic_window", c.output.asymptotic_window}};
    return j;
  }
  j["particles"] = nlohmann::ordered_json::array();
  for (const Particle& p : s.particles)
    j["particles"].push_back({{"charge", p.charge},
                              {"mass", p.mass},
                              {"position", vec_json(p.position)},
                              {"velocity", vec_json(p.velocity)},
                              {"acceleration", vec_json(p.acceleration)}});
  j["topology"] = {{"mode", to_string(s.topology.mode)},
                   {"p", s.topology.p},
                   {"boundary", to_string(s.topology.boundary)},
                   {"free_field", field_json(s.topology.free_field)}};
  j["external"] = field_json(s.external);
  const IntegratorConfig& ic = s.integrator;
  j["integrator"] = {{"method", to_string(ic.method)},
                     {"dt", ic.dt},
                     {"t_end", ic.t_end},
                     {"future_horizon", ic.future_horizon},
                     {"waveform_iterations", ic.waveform_iterations},
                     {"tolerance", ic.tolerance},
                     {"self_force", to_string(ic.self_force)},
                     {"terminal_condition", ic.terminal_condition}};
  j["output"] = {{"stride", c.output.stride}, {"asymptotic_window", c.output.asymptotic_window}};
  return j;
}

std::string to_yaml(const ScenarioConfig& c) {
  // JSON is valid YAML flow syntax; block style reads better, so emit
  // through yaml-cpp from the JSON tree.
  std::function<YAML::Node(const nlohmann::ordered_json&)> convert =
      [&](const nlohmann::ordered_json& j) -> YAML::Node {
    YAML::Node n;
    if (j.is_object()) {
      for (const auto& [k, v] : j.items()) n[k] = convert(v);
    } else if (j.is_array()) {
      n = YAML::Node(YAML::NodeType::Sequence);
      for (const auto& v : j) n.push_back(convert(v));
    } else if (j.is_string()) {
      n = j.get<std::string>();
    } else if (j.is_boolean()) {
      n = j.get<bool>();
    } else if (j.is_number_integer()) {
      n = j.get<long long>();
    } else {
      n = YAML::Node(j.dump());
    }
    return n;
  };
  YAML::Emitter out;
  out << convert(to_json(c));
  return std::string(out.c_str()) + "\n";
}

}  // namespace mcced
