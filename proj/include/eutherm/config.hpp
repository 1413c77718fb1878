#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "eutherm/materials.hpp"
#include "eutherm/simulator.hpp"

namespace eutherm {

// Flat key-value scene files with sectioned keys (grid.*, model.*,
// dissipation.*, run.*, init.*, verify.*). Parsing is fail-closed: unknown
// keys are errors, with a nearest-key suggestion; silently substituted
// defaults would invalidate the verification claims downstream.

namespace cfgdetail {

inline std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  size_t b = s.find_last_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

inline int edit_distance(const std::string& a, const std::string& b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
  for (size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (size_t j = 1; j <= b.size(); ++j) {
      const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "grid.d", "grid.n", "grid.length",
      "model.kind",
      // quadratic
      "model.shear_g", "model.coupling_alpha", "model.coupling_beta", "model.alpha0",
      "model.beta0", "model.theta0", "model.heat_capacity", "model.rho_ref",
      // mantle
      "model.biot_coupling", "model.biot_slope", "model.j_ref", "model.theta_ref",
      "model.p1", "model.p2", "model.clapeyron1", "model.clapeyron2",
      "model.j1_lo", "model.j1_hi", "model.j2_lo", "model.j2_hi",
      "model.slope0", "model.slope1", "model.deep_width", "model.fillet",
      "model.barrier_mu", "model.theta_min", "model.theta_max", "model.z_margin",
      // sma
      "model.bulk_k", "model.theta_t", "model.c_austenite", "model.c_martensite",
      "model.well_stretch", "model.smooth_min", "model.tau_w",
      // dissipation
      "dissipation.visc_shear", "dissipation.visc_bulk", "dissipation.diff_alpha",
      "dissipation.diff_beta", "dissipation.heat_k", "dissipation.source_a",
      "dissipation.plast", "dissipation.plast_eta", "dissipation.yield0",
      "dissipation.yield_slope", "dissipation.plast_exponent", "dissipation.eps_reg",
      // run
      "run.integrator", "run.dt", "run.t_end", "run.cfl", "run.gauge", "run.s_ext",
      "run.gravity_x", "run.gravity_y", "run.hyper_nu", "run.hyper_p",
      "run.out_interval", "run.snapshot_interval", "run.dealias", "run.seed",
      // init
      "init.v_amp", "init.theta0", "init.theta_amp", "init.fe_amp", "init.fe_scale",
      "init.z0", "init.z_amp", "init.other0", "init.kmax", "init.seed",
      // verify
      "verify.trials", "verify.kmax", "verify.corrupt",
  };
  return keys;
}

inline std::string suggest(const std::string& key) {
  const auto& keys = known_keys();
  int best = 1 << 20;
  std::string pick;
  for (const auto& k : keys) {
    const int d = edit_distance(key, k);
    if (d < best) {
      best = d;
      pick = k;
    }
  }
  return pick;
}

}  // namespace cfgdetail

struct RawConfig {
  std::map<std::string, std::string> kv;
  std::map<std::string, int> line_of;

  bool has(const std::string& k) const { return kv.count(k) > 0; }
  std::string str(const std::string& k, const std::string& dflt) const {
    auto it = kv.find(k);
    return it == kv.end() ? dflt : it->second;
  }
  double num(const std::string& k, double dflt, std::vector<std::string>* errs) const {
    auto it = kv.find(k);
    if (it == kv.end()) return dflt;
    try {
      size_t pos = 0;
      const double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("trailing junk");
      return v;
    } catch (...) {
      if (errs) errs->push_back(k + ": not a number: '" + it->second + "'");
      return dflt;
    }
  }
  bool flag(const std::string& k, bool dflt, std::vector<std::string>* errs) const {
    auto it = kv.find(k);
    if (it == kv.end()) return dflt;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    if (errs) errs->push_back(k + ": expected true/false, got '" + it->second + "'");
    return dflt;
  }
};

inline RawConfig read_raw_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("config: cannot open " + path);
  RawConfig raw;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = cfgdetail::trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = cfgdetail::trim(line.substr(0, eq));
    const std::string val = cfgdetail::trim(line.substr(eq + 1));
    const auto& keys = cfgdetail::known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ParseError("config line " + std::to_string(lineno) + ": unknown key '" + key +
                       "' (did you mean '" + cfgdetail::suggest(key) + "'?)");
    if (raw.kv.count(key))
      throw ParseError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    raw.kv[key] = val;
    raw.line_of[key] = lineno;
  }
  return raw;
}

// Model/verify settings not captured by SceneConfig proper.
struct VerifySettings {
  int trials = 10;
  int kmax = 0;  // 0: pick from grid
  PoissonCorruption corrupt = PoissonCorruption::None;
};

struct ParsedScene {
  SceneConfig scene;
  VerifySettings verify;
  std::string model_kind;
  MantleParams mantle;  // retained for material-table
  bool is_mantle = false;
};

inline ParsedScene build_scene(const RawConfig& raw) {
  std::vector<std::string> errs;
  ParsedScene out;

  const int d = static_cast<int>(raw.num("grid.d", 1, &errs));
  const int n = static_cast<int>(raw.num("grid.n", 64, &errs));
  const double len = raw.num("grid.length", 1.0, &errs);
  if (d < 1 || d > 2) errs.push_back("grid.d: must be 1 or 2");
  if (n < 8 || (n & (n - 1)) != 0) errs.push_back("grid.n: must be a power of two >= 8");
  if (!(len > 0)) errs.push_back("grid.length: must be positive");

  RunParams run;
  const std::string integ = raw.str("run.integrator", "rk4");
  if (integ == "rk4") run.integrator = Integrator::RK4;
  else if (integ == "heun") run.integrator = Integrator::Heun;
  else errs.push_back("run.integrator: expected rk4 or heun");
  run.dt = raw.num("run.dt", 1e-3, &errs);
  if (!(run.dt > 0)) errs.push_back("run.dt: must be positive");
  run.t_end = raw.num("run.t_end", 0.1, &errs);
  if (!(run.t_end >= 0)) errs.push_back("run.t_end: must be nonnegative");
  run.cfl = raw.num("run.cfl", 0.25, &errs);
  const std::string gauge = raw.str("run.gauge", "e");
  if (gauge == "theta") run.gauge = ThermalGauge::Temperature;
  else if (gauge == "e") run.gauge = ThermalGauge::InternalEnergy;
  else if (gauge == "s") run.gauge = ThermalGauge::Entropy;
  else errs.push_back("run.gauge: expected theta, e, or s");
  run.s_ext = static_cast<int>(raw.num("run.s_ext", 1, &errs));
  if (run.s_ext != 0 && run.s_ext != 1) errs.push_back("run.s_ext: must be 0 or 1");
  run.gravity[0] = raw.num("run.gravity_x", 0.0, &errs);
  run.gravity[1] = raw.num("run.gravity_y", 0.0, &errs);
  run.hyper_nu = raw.num("run.hyper_nu", 0.0, &errs);
  run.hyper_p = raw.num("run.hyper_p", 4.0, &errs);
  if (run.hyper_nu < 0) errs.push_back("run.hyper_nu: must be nonnegative");
  if (run.hyper_nu > 0 && !(run.hyper_p > d))
    errs.push_back("run.hyper_p: must exceed grid.d when hyperviscosity is on");
  run.out_interval = static_cast<int>(raw.num("run.out_interval", 10, &errs));
  run.snapshot_interval = static_cast<int>(raw.num("run.snapshot_interval", 0, &errs));
  run.dealias = raw.flag("run.dealias", true, &errs);
  run.seed = static_cast<uint64_t>(raw.num("run.seed", 1, &errs));

  InitParams init;
  init.v_amp = raw.num("init.v_amp", 0.0, &errs);
  init.theta0 = raw.num("init.theta0", 0.0, &errs);
  init.theta_amp = raw.num("init.theta_amp", 0.0, &errs);
  init.fe_amp = raw.num("init.fe_amp", 0.0, &errs);
  init.fe_scale = raw.num("init.fe_scale", 1.0, &errs);
  init.z0 = raw.num("init.z0", 0.0, &errs);
  init.z_amp = raw.num("init.z_amp", 0.0, &errs);
  init.other0 = raw.num("init.other0", 0.0, &errs);
  init.kmax = static_cast<int>(raw.num("init.kmax", 3, &errs));
  init.seed = static_cast<uint64_t>(raw.num("init.seed", 7, &errs));

  DissipationSpec diss;
  diss.visc_shear = raw.num("dissipation.visc_shear", 0.0, &errs);
  diss.visc_bulk = raw.num("dissipation.visc_bulk", 0.0, &errs);
  diss.diff_alpha = raw.num("dissipation.diff_alpha", 0.0, &errs);
  diss.diff_beta = raw.num("dissipation.diff_beta", 0.0, &errs);
  diss.heat_k = raw.num("dissipation.heat_k", 0.0, &errs);
  diss.source_a = raw.num("dissipation.source_a", 0.0, &errs);
  const std::string plast = raw.str("dissipation.plast", "none");
  if (plast == "none") diss.plast = DissipationSpec::Plast::None;
  else if (plast == "quadratic") diss.plast = DissipationSpec::Plast::Quadratic;
  else if (plast == "perzyna") diss.plast = DissipationSpec::Plast::Perzyna;
  else if (plast == "power") diss.plast = DissipationSpec::Plast::Power;
  else errs.push_back("dissipation.plast: expected none, quadratic, perzyna, or power");
  diss.plast_eta = raw.num("dissipation.plast_eta", 1.0, &errs);
  diss.yield0 = raw.num("dissipation.yield0", 0.0, &errs);
  diss.yield_slope = raw.num("dissipation.yield_slope", 0.0, &errs);
  diss.plast_exponent = raw.num("dissipation.plast_exponent", 2.0, &errs);
  diss.eps_reg = raw.num("dissipation.eps_reg", 1e-6, &errs);
  try {
    diss.validate();
  } catch (const std::exception& e) {
    errs.push_back(e.what());
  }

  const std::string kind = raw.str("model.kind", "");
  out.model_kind = kind;
  ThermoModel model;
  if (kind == "quadratic") {
    QuadraticParams p;
    p.G = raw.num("model.shear_g", p.G, &errs);
    p.a_alpha = raw.num("model.coupling_alpha", p.a_alpha, &errs);
    p.a_beta = raw.num("model.coupling_beta", p.a_beta, &errs);
    p.alpha0 = raw.num("model.alpha0", p.alpha0, &errs);
    p.beta0 = raw.num("model.beta0", p.beta0, &errs);
    p.theta0 = raw.num("model.theta0", p.theta0, &errs);
    p.c0 = raw.num("model.heat_capacity", p.c0, &errs);
    p.rho_ref = raw.num("model.rho_ref", p.rho_ref, &errs);
    if (errs.empty()) model = quadratic_test_model(p);
    if (!raw.has("init.theta0")) init.theta0 = p.theta0;
    if (!raw.has("init.z0")) init.z0 = run.s_ext == 1 ? p.beta0 : p.alpha0;
    if (!raw.has("init.other0")) init.other0 = run.s_ext == 1 ? p.alpha0 : p.beta0;
  } else if (kind == "mantle") {
    MantleParams p;
    p.G = raw.num("model.shear_g", p.G, &errs);
    p.B = raw.num("model.biot_coupling", p.B, &errs);
    p.b = raw.num("model.biot_slope", p.b, &errs);
    p.J_T = raw.num("model.j_ref", p.J_T, &errs);
    p.c = raw.num("model.heat_capacity", p.c, &errs);
    p.rho_ref = raw.num("model.rho_ref", p.rho_ref, &errs);
    p.theta_ref = raw.num("model.theta_ref", p.theta_ref, &errs);
    p.p1 = raw.num("model.p1", p.p1, &errs);
    p.p2 = raw.num("model.p2", p.p2, &errs);
    p.clapeyron1 = raw.num("model.clapeyron1", p.clapeyron1, &errs);
    p.clapeyron2 = raw.num("model.clapeyron2", p.clapeyron2, &errs);
    p.j1_lo = raw.num("model.j1_lo", p.j1_lo, &errs);
    p.j1_hi = raw.num("model.j1_hi", p.j1_hi, &errs);
    p.j2_lo = raw.num("model.j2_lo", p.j2_lo, &errs);
    p.j2_hi = raw.num("model.j2_hi", p.j2_hi, &errs);
    p.slope0 = raw.num("model.slope0", p.slope0, &errs);
    p.slope1 = raw.num("model.slope1", p.slope1, &errs);
    p.deep_width = raw.num("model.deep_width", p.deep_width, &errs);
    p.fillet = raw.num("model.fillet", p.fillet, &errs);
    p.barrier_mu = raw.num("model.barrier_mu", p.barrier_mu, &errs);
    p.theta_min = raw.num("model.theta_min", p.theta_min, &errs);
    p.theta_max = raw.num("model.theta_max", p.theta_max, &errs);
    p.z_margin = raw.num("model.z_margin", p.z_margin, &errs);
    out.mantle = p;
    out.is_mantle = true;
    if (errs.empty())
      model = mantle_energy(p, run.s_ext == 1 ? ZBind::Beta : ZBind::Alpha);
    if (!raw.has("init.theta0")) init.theta0 = p.theta_ref;
    if (!raw.has("init.z0")) init.z0 = 0.5;
    if (!raw.has("init.other0")) init.other0 = 0.0;
  } else if (kind == "sma") {
    SmaParams p = default_sma_params(d);
    const double lam = raw.num("model.well_stretch", 1.05, &errs);
    if (d == 2 && lam > 0) {
      p.wells[1] = Tensor2(2);
      p.wells[1](0, 0) = lam;
      p.wells[1](1, 1) = 1.0 / lam;
      p.wells[2] = Tensor2(2);
      p.wells[2](0, 0) = 1.0 / lam;
      p.wells[2](1, 1) = lam;
    }
    const double g0 = raw.num("model.shear_g", p.G[0], &errs);
    for (auto& v : p.G) v = g0;
    p.bulk_K = raw.num("model.bulk_k", p.bulk_K, &errs);
    p.theta_T = raw.num("model.theta_t", p.theta_T, &errs);
    const double c0 = raw.num("model.c_austenite", p.c[0], &errs);
    const double c1 = raw.num("model.c_martensite", p.c.size() > 1 ? p.c[1] : c0, &errs);
    p.c[0] = c0;
    for (size_t i = 1; i < p.c.size(); ++i) p.c[i] = c1;
    p.rho_ref = raw.num("model.rho_ref", p.rho_ref, &errs);
    p.smooth_min = raw.flag("model.smooth_min", false, &errs);
    p.tau_w = raw.num("model.tau_w", 0.0, &errs);
    if (errs.empty()) model = sma_energy(p);
    if (!raw.has("init.theta0")) init.theta0 = p.theta_T;
  } else if (kind.empty()) {
    errs.push_back("model.kind: required (quadratic, mantle, or sma)");
  } else {
    errs.push_back("model.kind: unknown kind '" + kind + "'");
  }

  out.verify.trials = static_cast<int>(raw.num("verify.trials", 10, &errs));
  out.verify.kmax = static_cast<int>(raw.num("verify.kmax", 0, &errs));
  const std::string corrupt = raw.str("verify.corrupt", "none");
  if (corrupt == "none") out.verify.corrupt = PoissonCorruption::None;
  else if (corrupt == "flip_jpbeta") out.verify.corrupt = PoissonCorruption::FlipJpBeta;
  else errs.push_back("verify.corrupt: expected none or flip_jpbeta");

  if (!errs.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errs) msg += "\n  " + e;
    throw ValidationError(msg);
  }

  out.scene.grid = Grid(d, n, len);
  out.scene.model = model.with_gauge(run.gauge);
  out.scene.onsager.diss = diss;
  out.scene.run = run;
  out.scene.init = init;
  return out;
}

inline ParsedScene parse_config(const std::string& path) {
  return build_scene(read_raw_config(path));
}

}  // namespace eutherm
