#include <openssl/evp.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <deque>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "mcced/harness.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace mcced {

std::string format_double(double x) {
  if (x == 0.0) return "0";  // also folds -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    fail(ErrorCode::io, "sha256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i)
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

std::string sha256_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot read " + p.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot write " + p.string());
  out << content;
  if (!out) fail(ErrorCode::io, "write failed: " + p.string());
}

struct Output {
  std::string file;
  std::size_t rows = 0;
};

Output write_trajectory_csv(const fs::path& dir, const TrajectoryRecord& r, int stride) {
  std::string text = "t,particle,x,y,z,ux,uy,uz,ax,ay,az,larmor\n";
  std::size_t rows = 0, steps = 0;
  for (const ParticleTrack& p : r.particles) steps = std::max(steps, p.samples.size());
  for (std::size_t i = 0; i < steps; ++i) {
    if (i % stride != 0 && i + 1 != steps) continue;
    for (std::size_t k = 0; k < r.particles.size(); ++k) {
      const auto& samples = r.particles[k].samples;
      if (i >= samples.size()) continue;
      const RecordSample& s = samples[i];
      text += format_double(s.t());
      text += ',' + std::to_string(k);
      for (int c = 1; c < 4; ++c) text += ',' + format_double(s.position(c));
      for (int c = 1; c < 4; ++c) text += ',' + format_double(s.velocity(c));
      for (int c = 1; c < 4; ++c) text += ',' + format_double(s.acceleration(c));
      text += ',' + format_double(s.larmor);
      text += '\n';
      ++rows;
    }
  }
  write_file(dir / "trajectory.csv", text);
  return {"trajectory.csv", rows};
}

json checks_json(const std::vector<CheckResult>& checks) {
  json arr = json::array();
  for (const CheckResult& c : checks)
    arr.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  return arr;
}

Output write_ledger(const fs::path& dir, const RunProducts& run) {
  const EnergyLedger& L = run.ledger;
  json j;
  j["method"] = run.record.method;
  j["p"] = run.record.p;
  j["energy"] = {{"kinetic_initial", L.kinetic_initial},
                 {"kinetic_final", L.kinetic_final},
                 {"delta_kinetic", L.delta_kinetic()},
                 {"radiated", L.radiated},
                 {"potential_initial", L.potential_initial},
                 {"potential_final", L.potential_final},
                 {"delta_potential", L.delta_potential()},
                 {"external_work", L.external_work},
                 {"closure_residual", L.closure_residual}};
  j["asymptotic"] = {{"pass", run.asymptotic.pass},
                     {"max_acceleration", run.asymptotic.max_acceleration},
                     {"growth_rate", run.asymptotic.growth_rate},
                     {"detail", run.asymptotic.detail}};
  if (run.runaway)
    j["runaway"] = {{"runaway", run.runaway->runaway},
                    {"truncated", run.runaway->truncated},
                    {"growth_rate", run.runaway->growth_rate},
                    {"expected_rate", run.runaway->expected_rate},
                    {"truncated_at", run.runaway->truncated_at},
                    {"detail", run.runaway->detail}};
  if (run.convergence)
    j["convergence"] = {{"iterations", run.convergence->iterations},
                        {"converged", run.convergence->converged},
                        {"residuals", run.convergence->residuals}};
  j["notes"] = run.record.notes;
  write_file(dir / "ledger.json", j.dump(2) + "\n");
  return {"ledger.json", 1};
}

Output write_checks(const fs::path& dir, const std::vector<CheckResult>& checks) {
  std::string text;
  for (const CheckResult& c : checks)
    text += std::string(c.pass ? "PASS" : "FAIL") + "  " + c.name + "  (" + c.detail + ")\n";
  write_file(dir / "checks.txt", text);
  return {"checks.txt", checks.size()};
}

int exit_code_for(ErrorCode c) { return static_cast<int>(c); }

}  // namespace

RunOutcome run(const ScenarioConfig& cfg, const RunOptions& opts) {
  std::error_code ec;
  fs::create_directories(opts.out_dir, ec);
  if (ec) fail(ErrorCode::io, "cannot create " + opts.out_dir.string() + ": " + ec.message());

  RunOutcome out;
  json& m = out.manifest;
  const json config = to_json(cfg);
  m["artifact"] = "mcced";
  m["version"] = kArtifactVersion;
  m["scenario"] = {{"name", cfg.scenario.name}, {"hash", sha256_hex(config.dump())}};
  m["config"] = config;
  m["seed"] = opts.seed;
  m["wall_time"] = {{"start", utc_now()}, {"end", nullptr}, {"seconds", nullptr}};
  const auto t_start = std::chrono::steady_clock::now();

  std::vector<Output> outputs;
  std::vector<CheckResult> checks;
  json error = nullptr;
  try {
    switch (cfg.kind) {
      case RunKind::trajectory: {
        const RunProducts run = simulate(cfg);
        outputs.push_back(write_trajectory_csv(opts.out_dir, run.record, cfg.output.stride));
        outputs.push_back(write_ledger(opts.out_dir, run));
        checks = trajectory_checks(cfg, run);
        break;
      }
      case RunKind::symmetry_suite:
        checks = symmetry_suite(cfg, opts.seed);
        outputs.push_back(write_checks(opts.out_dir, checks));
        break;
      case RunKind::algebra_suite:
        checks = algebra_suite();
        outputs.push_back(write_checks(opts.out_dir, checks));
        break;
    }
  } catch (const Error& e) {
    error = {{"code", to_string(e.code())}, {"exit_code", exit_code_for(e.code())},
             {"message", e.what()}};
    out.exit_code = exit_code_for(e.code());
  }

  json files = json::array();
  for (const Output& o : outputs)
    files.push_back(
        {{"file", o.file}, {"rows", o.rows}, {"sha256", sha256_file(opts.out_dir / o.file)}});
  m["outputs"] = files;
  std::size_t passed = 0;
  for (const CheckResult& c : checks) passed += c.pass;
  m["acceptance"] = {{"passed", passed}, {"failed", checks.size() - passed},
                     {"checks", checks_json(checks)}};
  m["status"] = error.is_null() ? "ok" : "error";
  m["error"] = error;
  if (error.is_null() && passed != checks.size()) out.exit_code = 1;
  m["exit_code"] = out.exit_code;
  m["wall_time"]["end"] = utc_now();
  m["wall_time"]["seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  out.manifest_path = opts.out_dir / "manifest.json";
  const fs::path tmp = opts.out_dir / "manifest.json.tmp";
  write_file(tmp, m.dump(2) + "\n");
  fs::rename(tmp, out.manifest_path, ec);
  if (ec) fail(ErrorCode::io, "cannot move manifest into place: " + ec.message());
  return out;
}

// ---------------------------------------------------------------------------
// Plot data

namespace {

struct Row {
  double t;
  std::size_t particle;
  Vec3 x, u, a;
  double larmor;
};

std::vector<Row> read_trajectory(const fs::path& csv) {
  std::ifstream in(csv);
  if (!in) fail(ErrorCode::io, "cannot read " + csv.string());
  std::string line;
  std::getline(in, line);
  if (line != "t,particle,x,y,z,ux,uy,uz,ax,ay,az,larmor")
    fail(ErrorCode::parse, csv.string() + ": unexpected header");
  std::vector<Row> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    double v[12];
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (int i = 0; i < 12; ++i) {
      const auto res = std::from_chars(p, end, v[i]);
      if (res.ec != std::errc() || (i < 11 && (res.ptr == end || *res.ptr != ',')))
        fail(ErrorCode::parse, csv.string() + ":" + std::to_string(lineno) + ": bad row");
      p = res.ptr + 1;
    }
    rows.push_back({v[0], static_cast<std::size_t>(v[1]), Vec3(v[2], v[3], v[4]),
                    Vec3(v[5], v[6], v[7]), Vec3(v[8], v[9], v[10]), v[11]});
  }
  return rows;
}

/// Invariant magnitude sqrt(−a·a) from the spatial parts of u and a.
double accel_magnitude(const Row& r) {
  const double u0 = std::sqrt(1.0 + r.u.squaredNorm());
  const double a0 = r.u.dot(r.a) / u0;
  return std::sqrt(std::max(0.0, r.a.squaredNorm() - a0 * a0));
}

/// Rows grouped by time, in file order.
std::vector<std::vector<Row>> by_time(const std::vector<Row>& rows) {
  std::vector<std::vector<Row>> out;
  for (const Row& r : rows) {
    if (out.empty() || out.back().front().t != r.t) out.emplace_back();
    out.back().push_back(r);
  }
  return out;
}

std::string line(std::initializer_list<double> cols) {
  std::string s;
  for (double c : cols) s += (s.empty() ? "" : " ") + format_double(c);
  return s + "\n";
}

}  // namespace

const std::vector<std::string>& plot_quantities() {
  static const std::vector<std::string> q = {"trajectory", "accel",  "larmor", "separation",
                                             "asymptotic", "ledger", "checks"};
  return q;
}

fs::path emit_plotdata(const fs::path& manifest_path, const std::string& quantity) {
  const auto& known = plot_quantities();
  if (std::find(known.begin(), known.end(), quantity) == known.end()) {
    std::string list;
    for (const std::string& q : known) list += (list.empty() ? "" : ", ") + q;
    fail(ErrorCode::usage, "unknown quantity '" + quantity + "' (available: " + list + ")");
  }
  std::ifstream in(manifest_path);
  if (!in) fail(ErrorCode::io, "cannot read " + manifest_path.string());
  json m;
  try {
    m = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::parse, manifest_path.string() + ": " + e.what());
  }
  const fs::path dir = manifest_path.parent_path();
  const fs::path target = dir / ("plot_" + quantity + ".dat");
  std::string text;

  if (quantity == "checks") {
    text = "# index pass name\n";
    std::size_t i = 0;
    for (const auto& c : m["acceptance"]["checks"]) {
      std::string name = c["name"].get<std::string>();
      std::replace(name.begin(), name.end(), ' ', '_');
      text += std::to_string(++i) + " " + (c["pass"].get<bool>() ? "1" : "0") + " " + name + "\n";
    }
    write_file(target, text);
    return target;
  }

  bool has_csv = false;
  for (const auto& o : m["outputs"]) has_csv = has_csv || o["file"] == "trajectory.csv";
  if (!has_csv)
    fail(ErrorCode::usage, "quantity '" + quantity + "' needs a trajectory run; " +
                               manifest_path.string() + " has no trajectory.csv");
  const std::vector<Row> rows = read_trajectory(dir / "trajectory.csv");
  const auto groups = by_time(rows);

  if (quantity == "trajectory") {
    text = "# t particle x y z\n";
    for (const Row& r : rows)
      text += line({r.t, static_cast<double>(r.particle), r.x(0), r.x(1), r.x(2)});
  } else if (quantity == "accel") {
    text = "# t particle |a|\n";
    for (const Row& r : rows) text += line({r.t, static_cast<double>(r.particle), accel_magnitude(r)});
  } else if (quantity == "larmor") {
    text = "# t sum_k R_k\n";
    for (const auto& g : groups) {
      double sum = 0.0;
      for (const Row& r : g) sum += r.larmor;
      text += line({g.front().t, sum});
    }
  } else if (quantity == "separation") {
    text = "# t |x1 - x2|\n";
    for (const auto& g : groups) {
      if (g.size() < 2)
        fail(ErrorCode::usage, "separation needs a run with at least two particles");
      text += line({g.front().t, (g[0].x - g[1].x).norm()});
    }
  } else if (quantity == "asymptotic") {
    double window = m["config"]["output"]["asymptotic_window"].get<double>();
    if (window <= 0) window = m["config"]["integrator"]["t_end"].get<double>() / 10;
    text = "# t max|a| over (t - " + format_double(window) + ", t]\n";
    std::deque<std::pair<double, double>> q;  // (t, max|a| at t), decreasing values
    for (const auto& g : groups) {
      double amax = 0.0;
      for (const Row& r : g) amax = std::max(amax, accel_magnitude(r));
      const double t = g.front().t;
      while (!q.empty() && q.back().second <= amax) q.pop_back();
      q.emplace_back(t, amax);
      while (q.front().first <= t - window) q.pop_front();
      text += line({t, q.front().second});
    }
  } else if (quantity == "ledger") {
    // Kinetic energy and radiated energy (trapezoid over the written rows).
    std::map<std::size_t, double> mass;
    for (const auto& p : m["config"]["particles"])
      mass[mass.size()] = p["mass"].get<double>();
    text = "# t kinetic radiated\n";
    double radiated = 0.0, prev_t = 0.0, prev_r = 0.0;
    bool first = true;
    for (const auto& g : groups) {
      double ke = 0.0, rsum = 0.0;
      for (const Row& r : g) {
        ke += mass[r.particle] * (std::sqrt(1.0 + r.u.squaredNorm()) - 1.0);
        rsum += r.larmor;
      }
      const double t = g.front().t;
      if (!first) radiated += 0.5 * (rsum + prev_r) * (t - prev_t);
      first = false;
      prev_t = t;
      prev_r = rsum;
      text += line({t, ke, radiated});
    }
  }
  write_file(target, text);
  return target;
}

}  // namespace mcced
