// Copyright 2026 The invit Authors
// SPDX-License-Identifier: Apache-2.0

#include "invit/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "invit/estimator.hpp"
#include "invit/kernels.hpp"
#include "invit/overlap_protocol.hpp"
#include "invit/pauli.hpp"
#include "invit/propagator.hpp"

#ifndef INVIT_VERSION
#define INVIT_VERSION "0.0.0"
#endif
#ifndef INVIT_CONFIG_DIR
#define INVIT_CONFIG_DIR "configs"
#endif

namespace invit {

using nlohmann::json;
namespace fs = std::filesystem;

const char* tool_version() { return INVIT_VERSION; }

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---------------------------------------------------------------- parsing

class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) fail("must be an object");
  }

  void fail(const std::string& msg) const {
    throw ValidationError("config " + where_ + ": " + msg);
  }

  bool has(const std::string& key) const {
    used_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }
  const json& raw(const std::string& key) const {
    used_.insert(key);
    return j_.at(key);
  }

  double number(const std::string& key, std::optional<double> def = std::nullopt) const {
    if (!has(key)) {
      if (def) return *def;
      fail("missing \"" + key + "\"");
    }
    const auto& v = j_.at(key);
    if (!v.is_number()) fail("\"" + key + "\" must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail("\"" + key + "\" must be finite");
    return x;
  }
  long long integer(const std::string& key, std::optional<long long> def = std::nullopt) const {
    if (!has(key)) {
      if (def) return *def;
      fail("missing \"" + key + "\"");
    }
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) fail("\"" + key + "\" must be an integer");
    return v.get<long long>();
  }
  std::string string(const std::string& key, std::optional<std::string> def = std::nullopt) const {
    if (!has(key)) {
      if (def) return *def;
      fail("missing \"" + key + "\"");
    }
    const auto& v = j_.at(key);
    if (!v.is_string()) fail("\"" + key + "\" must be a string");
    return v.get<std::string>();
  }
  bool boolean(const std::string& key, bool def) const {
    if (!has(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) fail("\"" + key + "\" must be true or false");
    return v.get<bool>();
  }
  std::vector<double> numbers(const std::string& key, std::vector<double> def) const {
    if (!has(key)) return def;
    const auto& v = j_.at(key);
    if (v.is_number()) return {number(key)};
    if (!v.is_array()) fail("\"" + key + "\" must be a number or a list of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number() || !std::isfinite(e.get<double>()))
        fail("\"" + key + "\" must contain finite numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }
  std::vector<long long> integers(const std::string& key, std::vector<long long> def) const {
    if (!has(key)) return def;
    const auto& v = j_.at(key);
    if (v.is_number_integer()) return {v.get<long long>()};
    if (!v.is_array()) fail("\"" + key + "\" must be an integer or a list of integers");
    std::vector<long long> out;
    for (const auto& e : v) {
      if (!e.is_number_integer()) fail("\"" + key + "\" must contain integers");
      out.push_back(e.get<long long>());
    }
    return out;
  }

  // Unknown keys are almost always typos; reject them.
  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!used_.count(k)) fail("unknown key \"" + k + "\"");
  }

 private:
  const json& j_;
  std::string where_;
  mutable std::set<std::string> used_;
};

ExperimentKind parse_kind(const std::string& s, const Reader& r) {
  if (s == "iteration") return ExperimentKind::Iteration;
  if (s == "skew_sweep") return ExperimentKind::SkewSweep;
  if (s == "trotter") return ExperimentKind::Trotter;
  if (s == "noise") return ExperimentKind::Noise;
  r.fail("unknown kind \"" + s + "\" (iteration, skew_sweep, trotter, noise)");
  return ExperimentKind::Iteration;
}

std::string mode_name(GridMode m) {
  switch (m) {
    case GridMode::FixedSteps: return "fixed_steps";
    case GridMode::FixedDelta: return "fixed_delta";
    case GridMode::Explicit: return "explicit";
  }
  return "explicit";
}

SystemSpec parse_system(const json& j, const fs::path& base_dir) {
  const Reader r(j, "system");
  SystemSpec s;
  const std::string type = r.string("type");
  if (type == "h2") {
    s.type = SystemType::H2;
  } else if (type == "pauli_file") {
    s.type = SystemType::PauliFile;
    std::string p = r.string("path");
    const std::string env = r.string("path_env", "");
    if (!env.empty())
      if (const char* e = std::getenv(env.c_str()); e && *e) p = e;
    s.path = fs::path(p).is_absolute() || base_dir.empty() ? fs::path(p) : base_dir / p;
  } else if (type == "bose_hubbard") {
    s.type = SystemType::BoseHubbard;
    s.n_sites = static_cast<int>(r.integer("n_sites", 5));
    s.n_bosons = static_cast<int>(r.integer("n_bosons", s.n_sites));
    s.n_max = static_cast<int>(r.integer("n_max", s.n_bosons));
    s.U = r.number("U", 1.0);
    s.mu = r.number("mu", 0.5);
    s.J = r.numbers("J", {0.1});
    const std::string b = r.string("boundary", "open");
    if (b == "open") s.boundary = Boundary::Open;
    else if (b == "periodic") s.boundary = Boundary::Periodic;
    else r.fail("boundary must be \"open\" or \"periodic\"");
    s.delta = r.number("delta", 1.0);
    if (s.n_sites < 1 || s.n_bosons < 0 || s.n_max < 1) r.fail("invalid lattice size");
    if (!(s.U > 0.0)) r.fail("U must be > 0");
    if (s.J.empty()) r.fail("J list is empty");
    for (double x : s.J)
      if (!(x >= 0.0)) r.fail("J must be >= 0");
    if (!(s.delta > 0.0)) r.fail("delta must be > 0");
  } else {
    r.fail("unknown system type \"" + type + "\" (h2, pauli_file, bose_hubbard)");
  }
  r.finish();
  return s;
}

GridSpec parse_grid(const json& j, const std::string& where) {
  const Reader r(j, where);
  GridSpec g;
  const std::string mode = r.string("mode", "fixed_steps");
  if (mode == "fixed_steps") g.mode = GridMode::FixedSteps;
  else if (mode == "fixed_delta") g.mode = GridMode::FixedDelta;
  else if (mode == "explicit") g.mode = GridMode::Explicit;
  else r.fail("mode must be fixed_steps, fixed_delta or explicit");
  if (g.mode == GridMode::FixedSteps) {
    g.m_y = static_cast<int>(r.integer("m_y", 30));
    g.m_z = static_cast<int>(r.integer("m_z", g.m_y));
    g.skew = r.number("skew", 1.0);
    g.phi_max_over_2pi = r.numbers("phi_max_over_2pi", {});
    if (g.phi_max_over_2pi.empty()) r.fail("fixed_steps grids need phi_max_over_2pi");
    if (!(g.skew > 0.0)) r.fail("skew must be > 0");
  } else if (g.mode == GridMode::FixedDelta) {
    g.delta_y = r.number("delta_y");
    g.delta_z = r.number("delta_z", g.delta_y);
    g.phi_max_over_2pi = r.numbers("phi_max_over_2pi", {});
    if (g.phi_max_over_2pi.empty()) r.fail("fixed_delta grids need phi_max_over_2pi");
  } else {
    g.m_y = static_cast<int>(r.integer("m_y"));
    g.m_z = static_cast<int>(r.integer("m_z", g.m_y));
    g.delta_y = r.number("delta_y");
    g.delta_z = r.number("delta_z", g.delta_y);
  }
  if (g.m_y < 1 || g.m_z < 1) r.fail("m_y and m_z must be >= 1");
  if (!(g.delta_y > 0.0) || !(g.delta_z > 0.0)) r.fail("grid steps must be > 0");
  for (double p : g.phi_max_over_2pi)
    if (!(p > 0.0)) r.fail("phi_max_over_2pi entries must be > 0");
  r.finish();
  return g;
}

json grid_to_json(const GridSpec& g) {
  json j;
  j["mode"] = mode_name(g.mode);
  if (g.mode != GridMode::FixedDelta) {
    j["m_y"] = g.m_y;
    j["m_z"] = g.m_z;
  }
  if (g.mode != GridMode::FixedSteps) {
    j["delta_y"] = g.delta_y;
    j["delta_z"] = g.delta_z;
  }
  if (g.mode == GridMode::FixedSteps) j["skew"] = g.skew;
  if (g.mode != GridMode::Explicit) j["phi_max_over_2pi"] = g.phi_max_over_2pi;
  return j;
}

json system_to_json(const SystemSpec& s) {
  json j;
  switch (s.type) {
    case SystemType::H2: j["type"] = "h2"; break;
    case SystemType::PauliFile:
      j["type"] = "pauli_file";
      j["path"] = s.path.lexically_normal().string();
      break;
    case SystemType::BoseHubbard:
      j["type"] = "bose_hubbard";
      j["n_sites"] = s.n_sites;
      j["n_bosons"] = s.n_bosons;
      j["n_max"] = s.n_max;
      j["U"] = s.U;
      j["mu"] = s.mu;
      j["J"] = s.J;
      j["boundary"] = s.boundary == Boundary::Open ? "open" : "periodic";
      j["delta"] = s.delta;
      break;
  }
  return j;
}

json normalize(const ExperimentConfig& c) {
  json j;
  j["name"] = c.name;
  j["kind"] = kind_name(c.kind);
  j["system"] = system_to_json(c.system);
  j["shift_e0"] = c.shift_e0 ? json(*c.shift_e0) : json(nullptr);
  j["initial_state"] = c.initial_index ? json{{"index", *c.initial_index}} : json(nullptr);
  j["grid"] = json::array();
  for (const auto& g : c.grids) j["grid"].push_back(grid_to_json(g));
  j["k_range"] = c.k_range;
  j["evolution"] = c.trotter_steps > 0
                       ? json{{"backend", "trotter"}, {"n_steps", c.trotter_steps}}
                       : json{{"backend", "exact"}};
  json ov{{"provider", c.protocol_overlaps ? "protocol" : "exact"}};
  if (c.protocol_overlaps) {
    ov["shots"] = c.shots ? json(*c.shots) : json(nullptr);
    ov["reference_index"] = c.reference_index;
  }
  j["overlaps"] = ov;
  j["seed"] = c.seed;
  j["trace_distance"] = c.trace_distance;
  json corr = json::array();
  for (auto [cc, rr] : c.correlations) corr.push_back({{"c", cc}, {"r", rr}});
  j["observables"] = {{"correlations", corr}};
  if (c.kind == ExperimentKind::SkewSweep) j["skews"] = c.skews;
  if (c.kind == ExperimentKind::Trotter) j["trotter_steps"] = c.trotter_step_list;
  if (c.kind == ExperimentKind::Noise) {
    j["noise"] = {{"n_trajectories", c.noise.n_trajectories},
                  {"gamma_sweep", c.noise.gamma_sweep},
                  {"gamma_min", c.noise.gamma_min},
                  {"extrap_orders", c.noise.extrap_orders},
                  {"representative_order", c.noise.representative_order},
                  {"probe_phases_over_2pi", c.probe_phases_over_2pi},
                  {"reference_index", c.reference_index}};
  }
  j["output"] = {{"path", c.output.lexically_normal().string()}};
  return j;
}

std::size_t system_qubit_dim_hint(const SystemSpec& s) {
  return s.type == SystemType::H2 ? 16 : 0;
}

}  // namespace

std::string kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Iteration: return "iteration";
    case ExperimentKind::SkewSweep: return "skew_sweep";
    case ExperimentKind::Trotter: return "trotter";
    case ExperimentKind::Noise: return "noise";
  }
  return "iteration";
}

ExperimentConfig parse_config(const json& j, const fs::path& base_dir,
                              const std::string& default_name) {
  const Reader r(j, "root");
  ExperimentConfig c;
  c.name = r.string("name", default_name);
  if (c.name.empty()) r.fail("name is empty");
  c.kind = parse_kind(r.string("kind", "iteration"), r);
  if (!r.has("system")) r.fail("missing \"system\"");
  c.system = parse_system(r.raw("system"), base_dir);

  if (r.has("shift_e0")) c.shift_e0 = r.number("shift_e0");
  if (r.has("initial_state")) {
    const Reader s(r.raw("initial_state"), "initial_state");
    if (s.has("index") == s.has("spins")) s.fail("give exactly one of \"index\" or \"spins\"");
    if (s.has("index")) {
      const long long i = s.integer("index");
      if (i < 0) s.fail("index must be >= 0");
      c.initial_index = static_cast<std::size_t>(i);
    } else {
      try {
        c.initial_index = spin_index(s.string("spins"));
      } catch (const Error& e) {
        s.fail(e.what());
      }
    }
    s.finish();
  }

  if (r.has("grid")) {
    const json& g = r.raw("grid");
    if (g.is_array()) {
      for (std::size_t i = 0; i < g.size(); ++i)
        c.grids.push_back(parse_grid(g[i], "grid[" + std::to_string(i) + "]"));
    } else {
      c.grids.push_back(parse_grid(g, "grid"));
    }
  }
  if (c.grids.empty()) r.fail("at least one grid is required");

  if (!r.has("k_range")) r.fail("missing \"k_range\"");
  const json& kr = r.raw("k_range");
  if (kr.is_object()) {
    const Reader kk(kr, "k_range");
    const long long a = kk.integer("from"), b = kk.integer("to");
    kk.finish();
    for (long long k = a; k <= b; ++k) c.k_range.push_back(static_cast<int>(k));
  } else {
    for (long long k : r.integers("k_range", {})) c.k_range.push_back(static_cast<int>(k));
  }
  if (c.k_range.empty()) r.fail("k_range is empty");
  for (int k : c.k_range)
    if (k < 0 || k > 200) r.fail("k_range entries must lie in [0, 200]");

  if (r.has("evolution")) {
    const Reader e(r.raw("evolution"), "evolution");
    const std::string b = e.string("backend", "exact");
    if (b == "trotter") {
      c.trotter_steps = static_cast<int>(e.integer("n_steps"));
      if (c.trotter_steps < 1) e.fail("n_steps must be >= 1");
    } else if (b != "exact") {
      e.fail("backend must be \"exact\" or \"trotter\"");
    }
    e.finish();
  }
  c.seed = static_cast<std::uint64_t>(r.integer("seed", 20190917));
  if (r.has("overlaps")) {
    const Reader o(r.raw("overlaps"), "overlaps");
    const std::string p = o.string("provider", "exact");
    if (p == "protocol") {
      c.protocol_overlaps = true;
      if (o.has("shots")) {
        const long long s = o.integer("shots");
        if (s < 1) o.fail("shots must be >= 1");
        c.shots = static_cast<std::uint64_t>(s);
      }
      c.reference_index = static_cast<std::size_t>(o.integer("reference_index", 0));
    } else if (p != "exact") {
      o.fail("provider must be \"exact\" or \"protocol\"");
    }
    o.finish();
  }
  c.trace_distance = r.boolean("trace_distance", c.kind != ExperimentKind::Noise);
  if (r.has("observables")) {
    const Reader o(r.raw("observables"), "observables");
    if (o.has("correlations")) {
      const json& a = o.raw("correlations");
      if (!a.is_array()) o.fail("correlations must be a list");
      for (const auto& e : a) {
        const Reader cr(e, "observables.correlations");
        c.correlations.emplace_back(static_cast<int>(cr.integer("c")),
                                    static_cast<int>(cr.integer("r")));
        cr.finish();
      }
    }
    o.finish();
  }
  if (!c.correlations.empty() && c.system.type != SystemType::BoseHubbard)
    r.fail("correlations are defined for bose_hubbard systems only");
  for (auto [cc, rr] : c.correlations)
    if (cc < 0 || cc >= c.system.n_sites || cc + rr < 0 || cc + rr >= c.system.n_sites)
      r.fail("correlation site out of range");

  if (c.kind == ExperimentKind::SkewSweep) {
    c.skews = r.numbers("skews", {});
    if (c.skews.empty()) r.fail("skew_sweep needs a nonempty \"skews\" list");
    for (double s : c.skews)
      if (!(s > 0.0)) r.fail("skews must be > 0");
    if (c.grids.size() != 1 || c.grids[0].mode != GridMode::FixedSteps ||
        c.grids[0].phi_max_over_2pi.size() != 1)
      r.fail("skew_sweep needs one fixed_steps grid with a single phi_max_over_2pi");
  }
  if (c.kind == ExperimentKind::Trotter) {
    for (long long n : r.integers("trotter_steps", {})) {
      if (n < 1) r.fail("trotter_steps entries must be >= 1");
      c.trotter_step_list.push_back(static_cast<int>(n));
    }
    if (c.trotter_step_list.empty()) r.fail("trotter kind needs a nonempty \"trotter_steps\" list");
  }
  if ((c.kind == ExperimentKind::Trotter || c.trotter_steps > 0 ||
       c.kind == ExperimentKind::Noise) &&
      c.system.type == SystemType::BoseHubbard)
    r.fail(kind_name(c.kind) + " runs need a qubit (Pauli) system");
  if (c.kind == ExperimentKind::Noise) {
    if (!r.has("noise")) r.fail("noise kind needs a \"noise\" block");
    const Reader n(r.raw("noise"), "noise");
    c.noise.n_trajectories = static_cast<int>(n.integer("n_trajectories", 5000));
    c.noise.gamma_sweep = n.numbers("gamma_sweep", c.noise.gamma_sweep);
    c.noise.gamma_min = n.number("gamma_min", c.noise.gamma_min);
    c.noise.extrap_orders.clear();
    for (long long a : n.integers("extrap_orders", {1, 3}))
      c.noise.extrap_orders.push_back(static_cast<int>(a));
    c.noise.representative_order = static_cast<int>(n.integer("representative_order", 3));
    c.probe_phases_over_2pi = n.numbers("probe_phases_over_2pi", {});
    c.reference_index = static_cast<std::size_t>(n.integer("reference_index", 0));
    n.finish();
    c.noise.master_seed = c.seed;
    try {
      c.noise.validate();
    } catch (const ValidationError& e) {
      n.fail(e.what());
    }
    if (c.noise.extrap_orders.size() != 2) n.fail("extrap_orders needs two entries");
    const std::size_t usable = static_cast<std::size_t>(std::count_if(
        c.noise.gamma_sweep.begin(), c.noise.gamma_sweep.end(),
        [&](double g) { return g >= c.noise.gamma_min; }));
    if (usable < static_cast<std::size_t>(c.noise.extrap_orders.back()) + 1)
      n.fail("too few gamma_sweep points above gamma_min for the fit order");
  }
  if (c.system.type == SystemType::PauliFile && !c.shift_e0)
    r.fail("pauli_file systems need shift_e0");
  if (c.system.type == SystemType::PauliFile && !c.initial_index)
    r.fail("pauli_file systems need initial_state");
  if (c.system.type == SystemType::BoseHubbard && c.initial_index)
    r.fail("bose_hubbard systems start from the Mott state; drop initial_state");
  if (const std::size_t d = system_qubit_dim_hint(c.system); d && c.initial_index &&
                                                             *c.initial_index >= d)
    r.fail("initial_state index out of range");

  if (r.has("output")) {
    const Reader o(r.raw("output"), "output");
    const std::string p = o.string("path");
    o.finish();
    c.output = fs::path(p);
  } else {
    c.output = fs::path("results") / (c.name + ".csv");
  }
  if (c.output.extension() != ".csv") r.fail("output path must end in .csv");
  r.finish();
  c.normalized = normalize(c);
  return c;
}

ExperimentConfig parse_config_text(const std::string& text, const fs::path& base_dir,
                                   const std::string& default_name) {
  json j;
  try {
    j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed config: ") + e.what());
  }
  return parse_config(j, base_dir, default_name);
}

fs::path bundled_config_dir() {
  if (const char* e = std::getenv("INVIT_CONFIG_DIR"); e && *e) return e;
  return INVIT_CONFIG_DIR;
}

std::vector<std::string> list_bundled() {
  std::vector<std::string> out;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(bundled_config_dir(), ec))
    if (e.path().extension() == ".json") out.push_back(e.path().stem().string());
  std::sort(out.begin(), out.end());
  return out;
}

ExperimentConfig load_config(const std::string& path_or_name) {
  fs::path p(path_or_name);
  if (!fs::exists(p)) {
    const fs::path b = bundled_config_dir() / (path_or_name + ".json");
    if (p.extension().empty() && fs::exists(b)) p = b;
    else throw ValidationError("no config file or bundled config named \"" + path_or_name + "\"");
  }
  std::ifstream in(p);
  if (!in) throw ValidationError("cannot read config " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), p.parent_path(), p.stem().string());
}

std::string config_hash(const ExperimentConfig& cfg) {
  json j = cfg.normalized;
  j.erase("output");
  j.erase("name");
  const std::string s = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void ResultTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns.size())
    throw Error("table " + name + ": row has " + std::to_string(cells.size()) + " cells, expected " +
                std::to_string(columns.size()));
  rows.push_back(std::move(cells));
}

std::vector<std::string> primary_columns(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Iteration:
      return {"system_param", "grid_mode", "phi_max_over_2pi", "skew", "m_y", "m_z", "delta_y",
              "delta_z", "n_phases", "k", "lambda_est", "lambda_ideal", "lambda_gs",
              "delta_lambda", "delta_lambda_ideal", "trace_distance", "imag_residue"};
    case ExperimentKind::SkewSweep:
      return {"skew", "phi_max_over_2pi", "m_y", "m_z", "delta_y", "delta_z", "k",
              "lambda_est", "delta_lambda", "trace_distance"};
    case ExperimentKind::Trotter:
      return {"phi_max_over_2pi", "m_y", "m_z", "delta_y", "delta_z", "n_steps", "k",
              "lambda_exact_backend", "lambda_trotter", "delta_lambda_exact_backend",
              "delta_lambda_trotter", "trotter_difference", "trace_distance_backends"};
    case ExperimentKind::Noise:
      return {"k", "branch", "lambda_est", "delta_lambda"};
  }
  return {};
}

namespace {

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}
std::string fmt(int x) { return std::to_string(x); }
std::string fmt(std::size_t x) { return std::to_string(x); }

// One concrete Hamiltonian of a run (Bose-Hubbard configs sweep J).
struct Prepared {
  double param = kNaN;  // J for Bose-Hubbard
  HermitianOperator op;
  double shift = 0.0;
  StateVector psi0;
  double lambda_gs = 0.0;  // shifted
  std::optional<PauliSum> pauli;
  std::optional<FockBasis> basis;
};

std::vector<Prepared> prepare(const ExperimentConfig& c) {
  std::vector<Prepared> out;
  if (c.system.type == SystemType::BoseHubbard) {
    const auto& s = c.system;
    const FockBasis basis = build_fock_basis(s.n_sites, s.n_max, s.n_bosons);
    for (double J : s.J) {
      Prepared p;
      p.param = J;
      const HermitianOperator h =
          build_bose_hubbard(basis, {J, s.U, s.mu, 0.0}, s.boundary);
      p.shift = c.shift_e0 ? *c.shift_e0 : positivity_shift(h, s.delta * s.U);
      p.op = shift(h, p.shift);
      p.psi0 = mott_state(basis);
      p.basis = basis;
      p.lambda_gs = p.op.min_eigenvalue();
      out.push_back(std::move(p));
    }
    return out;
  }
  Prepared p;
  if (c.system.type == SystemType::H2) {
    p.pauli = build_h2();
  } else {
    if (!fs::exists(c.system.path))
      throw ValidationError("Pauli-sum file not found: " + c.system.path.string());
    p.pauli = load_pauli_sum(c.system.path);
  }
  p.shift = c.shift_e0 ? *c.shift_e0 : 2.0;
  p.op = shift(to_dense(*p.pauli), p.shift);
  const std::size_t idx = c.initial_index ? *c.initial_index
                                          : (c.system.type == SystemType::H2 ? spin_index("dduu") : 0);
  if (idx >= p.op.dim()) throw ValidationError("initial_state index out of range");
  p.psi0 = StateVector::basis(p.op.dim(), idx);
  p.lambda_gs = p.op.min_eigenvalue();
  out.push_back(std::move(p));
  return out;
}

struct ConcreteGrid {
  GridMode mode;
  GridParams g;  // k filled per row
};

std::vector<ConcreteGrid> expand_grids(const std::vector<GridSpec>& specs) {
  std::vector<ConcreteGrid> out;
  for (const auto& s : specs) {
    if (s.mode == GridMode::Explicit) {
      out.push_back({s.mode, {1, s.m_y, s.m_z, s.delta_y, s.delta_z}});
      continue;
    }
    for (double pm : s.phi_max_over_2pi) {
      const double phi = kTwoPi * pm;
      if (s.mode == GridMode::FixedSteps) {
        out.push_back({s.mode, grid_from_phi_max(1, s.m_y, s.m_z, phi, s.skew)});
      } else {
        const int m = std::max(
            1, static_cast<int>(std::lround(std::sqrt(phi / (s.delta_y * s.delta_z)))));
        out.push_back({s.mode, {1, m, m, s.delta_y, s.delta_z}});
      }
    }
  }
  return out;
}

EvolutionBackend make_backend(const Prepared& p, int n_steps) {
  if (n_steps <= 0) return ExactBackend{};
  if (!p.pauli) throw ValidationError("Trotter evolution needs a Pauli Hamiltonian");
  return make_trotter(partition_commuting(*p.pauli), n_steps, p.op);
}

std::unique_ptr<OverlapProvider> make_provider_for(const ExperimentConfig& c, const Prepared& p,
                                                   const EvolutionBackend& backend) {
  if (!c.protocol_overlaps) return std::make_unique<ExactOverlapProvider>(p.op, p.psi0, backend);
  if (c.reference_index >= p.op.dim()) throw ValidationError("reference_index out of range");
  return std::make_unique<ProtocolOverlapProvider>(
      p.op, p.psi0, StateVector::basis(p.op.dim(), c.reference_index), backend, c.shots, c.seed);
}

// Estimate at one (grid, k); NaN when the denominator vanishes.
struct Estimate {
  double lambda = kNaN;
  double residue = kNaN;
  std::size_t n_phases = 0;
};

Estimate estimate_at(const Prepared& p, const PhaseLedger& led, const OverlapProvider& prov) {
  Estimate e;
  e.n_phases = led.rows.size();
  try {
    const auto rep = estimate_energy(p.op, p.psi0, led, prov);
    e.lambda = rep.lambda_est;
    e.residue = rep.imag_residue;
  } catch (const IllConditionedError&) {
  }
  return e;
}

double trace_dist(const ExpansionSeries& s, const HermitianOperator& op, int k) {
  return trace_distance(materialize_inverse(s, op), exact_inverse_power(op, k));
}

// Series-applied operator column by column with an arbitrary backend.
CMatrix series_operator(const ExpansionSeries& s, const HermitianOperator& op,
                        const EvolutionBackend& backend) {
  const std::size_t d = op.dim();
  CMatrix m(d, d);
  for (std::size_t i = 0; i < d; ++i)
    m.col(static_cast<Eigen::Index>(i)) =
        apply_series(s, op, StateVector::basis(d, i), backend).state;
  return m;
}

RunResult run_iteration(const ExperimentConfig& c) {
  RunResult res;
  ResultTable t{"iteration", primary_columns(ExperimentKind::Iteration), {}};
  ResultTable corr{"correlations",
                   {"system_param", "grid_mode", "phi_max_over_2pi", "k", "c", "r", "value_est",
                    "value_ideal", "value_exact"},
                   {}};
  const auto grids = expand_grids(c.grids);
  std::ostringstream summary;
  for (const auto& p : prepare(c)) {
    const EvolutionBackend backend = make_backend(p, c.trotter_steps);
    const auto prov = make_provider_for(c, p, backend);
    std::vector<std::pair<CMatrix, double>> corr_ops;
    for (auto [cc, rr] : c.correlations) {
      const CMatrix a = correlation_operator(*p.basis, cc, rr);
      const CVector g = p.op.eigenvectors().col(0);
      const double exact = (g.dot(0.5 * (a + a.adjoint()) * g)).real();
      corr_ops.emplace_back(a, exact);
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& cg : grids) {
      for (int k : c.k_range) {
        GridParams g = cg.g;
        g.k = std::max(k, 1);
        std::optional<ExpansionSeries> s;
        PhaseLedger led = identity_ledger();
        if (k > 0) {
          s = build_series(g);
          led = dedup_phases(*s);
        }
        const Estimate e = estimate_at(p, led, *prov);
        const double ideal = ideal_iterate(p.op, p.psi0, k).energy;
        const double td = (k > 0 && c.trace_distance) ? trace_dist(*s, p.op, k) : kNaN;
        best = std::min(best, std::abs(e.lambda - p.lambda_gs));
        t.add_row({fmt(p.param), mode_name(cg.mode), fmt(g.phi_max() / kTwoPi), fmt(g.skew()),
                   fmt(g.m_y), fmt(g.m_z), fmt(g.delta_y), fmt(g.delta_z), fmt(e.n_phases),
                   fmt(k), fmt(e.lambda - p.shift), fmt(ideal - p.shift),
                   fmt(p.lambda_gs - p.shift), fmt(e.lambda - p.lambda_gs),
                   fmt(ideal - p.lambda_gs), fmt(td), fmt(e.residue)});
        for (std::size_t i = 0; i < corr_ops.size(); ++i) {
          const auto& [a, exact] = corr_ops[i];
          const double est = k > 0 ? estimate_observable(a, p.op, p.psi0, *s, backend)
                                    : ideal_observable(a, p.op, p.psi0, 0);
          corr.add_row({fmt(p.param), mode_name(cg.mode), fmt(g.phi_max() / kTwoPi), fmt(k),
                        fmt(c.correlations[i].first), fmt(c.correlations[i].second), fmt(est),
                        fmt(ideal_observable(a, p.op, p.psi0, k)), fmt(exact)});
        }
      }
    }
    summary << "  " << (std::isnan(p.param) ? std::string("system") : "J=" + fmt(p.param))
            << ": lambda_gs=" << fmt(p.lambda_gs - p.shift) << ", best |delta_lambda|=" << fmt(best)
            << "\n";
  }
  res.tables.push_back(std::move(t));
  if (!c.correlations.empty()) res.tables.push_back(std::move(corr));
  res.summary = summary.str();
  return res;
}

RunResult run_skew(const ExperimentConfig& c) {
  RunResult res;
  ResultTable t{"skew_sweep", primary_columns(ExperimentKind::SkewSweep), {}};
  const GridSpec& gs = c.grids[0];
  const double phi = kTwoPi * gs.phi_max_over_2pi[0];
  for (const auto& p : prepare(c)) {
    const EvolutionBackend backend = make_backend(p, c.trotter_steps);
    const auto prov = make_provider_for(c, p, backend);
    for (double skew : c.skews)
      for (int k : c.k_range) {
        const GridParams g = grid_from_phi_max(std::max(k, 1), gs.m_y, gs.m_z, phi, skew);
        const auto s = build_series(g);
        const Estimate e = k > 0 ? estimate_at(p, dedup_phases(s), *prov)
                                 : estimate_at(p, identity_ledger(), *prov);
        const double td = (k > 0 && c.trace_distance) ? trace_dist(s, p.op, k) : kNaN;
        t.add_row({fmt(skew), fmt(g.phi_max() / kTwoPi), fmt(g.m_y), fmt(g.m_z), fmt(g.delta_y),
                   fmt(g.delta_z), fmt(k), fmt(e.lambda - p.shift), fmt(e.lambda - p.lambda_gs),
                   fmt(td)});
      }
  }
  res.summary = "  " + std::to_string(t.rows.size()) + " skew rows\n";
  res.tables.push_back(std::move(t));
  return res;
}

RunResult run_trotter(const ExperimentConfig& c) {
  RunResult res;
  ResultTable t{"trotter", primary_columns(ExperimentKind::Trotter), {}};
  const auto grids = expand_grids(c.grids);
  const Prepared p = prepare(c).front();
  const auto groups = partition_commuting(*p.pauli);
  const auto exact_prov = make_provider_for(c, p, ExactBackend{});
  for (const auto& cg : grids)
    for (int k : c.k_range) {
      if (k < 1) continue;
      GridParams g = cg.g;
      g.k = k;
      const auto s = build_series(g);
      const auto led = dedup_phases(s);
      const Estimate ex = estimate_at(p, led, *exact_prov);
      const bool want_td = c.trace_distance && p.op.dim() <= 64;
      const CMatrix m_exact = want_td ? materialize_inverse(s, p.op) : CMatrix();
      for (int n : c.trotter_step_list) {
        const EvolutionBackend tb = make_trotter(groups, n, p.op);
        const auto prov = make_provider_for(c, p, tb);
        const Estimate tr = estimate_at(p, led, *prov);
        const double td = want_td ? trace_distance(series_operator(s, p.op, tb), m_exact) : kNaN;
        t.add_row({fmt(g.phi_max() / kTwoPi), fmt(g.m_y), fmt(g.m_z), fmt(g.delta_y),
                   fmt(g.delta_z), fmt(n), fmt(k), fmt(ex.lambda - p.shift),
                   fmt(tr.lambda - p.shift), fmt(ex.lambda - p.lambda_gs),
                   fmt(tr.lambda - p.lambda_gs), fmt(tr.lambda - ex.lambda), fmt(td)});
      }
    }
  res.summary = "  " + std::to_string(t.rows.size()) + " Trotter rows, " +
                std::to_string(groups.size()) + " commuting groups\n";
  res.tables.push_back(std::move(t));
  return res;
}

RunResult run_noise(const ExperimentConfig& c) {
  RunResult res;
  const Prepared p = prepare(c).front();
  if (c.reference_index >= p.op.dim()) throw ValidationError("reference_index out of range");
  const StateVector psiR = StateVector::basis(p.op.dim(), c.reference_index);
  const auto grids = expand_grids(c.grids);
  if (grids.size() != 1) throw ValidationError("noise runs take exactly one grid");

  std::map<int, PhaseLedger> ledgers;
  std::set<double> phase_set{0.0};
  for (int k : c.k_range) {
    GridParams g = grids[0].g;
    g.k = std::max(k, 1);
    ledgers[k] = k > 0 ? dedup_phases(build_series(g)) : identity_ledger();
    for (const auto& r : ledgers[k].rows) phase_set.insert(r.delta_phi);
  }
  for (double q : c.probe_phases_over_2pi) phase_set.insert(kTwoPi * q);
  const std::vector<double> phases(phase_set.begin(), phase_set.end());

  NoiseConfig ncfg = c.noise;
  ncfg.master_seed = c.seed;
  const MitigationTable table = run_mitigation(p.op, p.psi0, psiR, phases, ncfg);

  ResultTable energies{"noise", primary_columns(ExperimentKind::Noise), {}};
  const ExactOverlapProvider noiseless(p.op, p.psi0);
  const auto direct = make_provider(table, MitigatedBranch::DirectAtGammaMin);
  const auto indirect = make_provider(table, MitigatedBranch::IndirectAtGammaMin);
  const auto mitigated = make_provider(table, MitigatedBranch::Combined);
  const std::pair<const char*, const OverlapProvider*> branches[] = {
      {"noiseless", &noiseless},
      {"direct_gamma_min", &direct},
      {"indirect_gamma_min", &indirect},
      {"mitigated", &mitigated}};
  for (int k : c.k_range)
    for (const auto& [label, prov] : branches) {
      const Estimate e = estimate_at(p, ledgers[k], *prov);
      energies.add_row({fmt(k), label, fmt(e.lambda - p.shift), fmt(e.lambda - p.lambda_gs)});
    }

  ResultTable overlaps{"overlaps",
                       {"dphi_over_2pi", "quantity", "gamma", "direct", "se_direct", "indirect",
                        "se_indirect"},
                       {}};
  ResultTable extrap{"extrapolation",
                     {"dphi_over_2pi", "quantity", "noiseless", "extrap_dir_1", "extrap_dir_3",
                      "extrap_ind_1", "extrap_ind_3", "combined", "at_gamma_min_direct",
                      "at_gamma_min_indirect"},
                     {}};
  for (double q : c.probe_phases_over_2pi) {
    const double d = kTwoPi * q;
    const std::size_t i = static_cast<std::size_t>(
        std::lower_bound(phases.begin(), phases.end(), d) - phases.begin());
    const std::vector<double> one{d};
    const OverlapValue nv = noiseless.overlaps(one)[0];
    for (int which = 0; which < 2; ++which) {
      const MitigationRecord& r = which == 0 ? table.norm[i] : table.energy[i];
      const char* qty = which == 0 ? "norm" : "energy";
      for (std::size_t g = 0; g < r.values_direct.size(); ++g)
        overlaps.add_row({fmt(q), qty, fmt(r.values_direct[g].gamma),
                          fmt(r.values_direct[g].value), fmt(r.values_direct[g].std_err),
                          fmt(r.values_indirect[g].value), fmt(r.values_indirect[g].std_err)});
      extrap.add_row({fmt(q), qty, fmt(which == 0 ? nv.norm.real() : nv.energy.real()),
                      fmt(r.extrap_dir_1), fmt(r.extrap_dir_3), fmt(r.extrap_ind_1),
                      fmt(r.extrap_ind_3), fmt(r.combined), fmt(r.at_gamma_min_direct),
                      fmt(r.at_gamma_min_indirect)});
    }
  }

  ResultTable weights{"weights", {"k", "delta_phi_over_2pi", "weight"}, {}};
  for (int k : c.k_range) {
    if (k < 1) continue;
    for (auto [d, w] : weight_histogram(ledgers[k]))
      weights.add_row({fmt(k), fmt(d / kTwoPi), fmt(w)});
  }
  res.summary = "  " + std::to_string(phases.size()) + " phases x " +
                std::to_string(c.noise.gamma_sweep.size()) + " rates x " +
                std::to_string(c.noise.n_trajectories) + " trajectories\n";
  res.tables.push_back(std::move(energies));
  res.tables.push_back(std::move(overlaps));
  res.tables.push_back(std::move(extrap));
  res.tables.push_back(std::move(weights));
  return res;
}

void write_csv(const fs::path& path, const ResultTable& t) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
  RunResult res;
  switch (cfg.kind) {
    case ExperimentKind::Iteration: res = run_iteration(cfg); break;
    case ExperimentKind::SkewSweep: res = run_skew(cfg); break;
    case ExperimentKind::Trotter: res = run_trotter(cfg); break;
    case ExperimentKind::Noise: res = run_noise(cfg); break;
  }
  json meta;
  meta["name"] = cfg.name;
  meta["kind"] = kind_name(cfg.kind);
  meta["config_hash"] = config_hash(cfg);
  meta["seed"] = cfg.seed;
  meta["version"] = tool_version();
  meta["simd_backend"] = std::string(kernels::backend_name(kernels::active_backend()));
  meta["config"] = cfg.normalized;
  res.metadata = meta;
  return res;
}

void write_result(const ExperimentConfig& cfg, RunResult& result) {
  const fs::path primary = cfg.output;
  if (primary.has_parent_path()) fs::create_directories(primary.parent_path());
  const fs::path stem = primary.parent_path() / primary.stem();
  json tables = json::object();
  for (std::size_t i = 0; i < result.tables.size(); ++i) {
    const auto& t = result.tables[i];
    const fs::path p = i == 0 ? primary : fs::path(stem.string() + "_" + t.name + ".csv");
    write_csv(p, t);
    result.written.push_back(p);
    tables[t.name] = {{"file", p.filename().string()}, {"columns", t.columns},
                      {"rows", t.rows.size()}};
  }
  result.metadata["tables"] = tables;
  const fs::path meta = stem.string() + ".json";
  std::ofstream out(meta);
  if (!out) throw Error("cannot write " + meta.string());
  out << result.metadata.dump(2) << "\n";
  result.written.push_back(meta);
}

}  // namespace invit
