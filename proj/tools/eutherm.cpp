// Command-line driver: structural verification, time integration, and
// material state-equation tables, all from one scene configuration file.
//
// Exit codes: 0 success, 1 verification failure, 2 configuration error,
// 3 runtime abort (blow-up or inadmissible state).

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "eutherm/block_poisson.hpp"
#include "eutherm/config.hpp"
#include "eutherm/simulator.hpp"
#include "eutherm/snapshot.hpp"
#include "eutherm/verify.hpp"

namespace {

using namespace eutherm;

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

int cmd_verify(const std::string& config_path, const std::string& out_dir, uint64_t seed,
               int trials_override, bool appendix_a, bool negative_controls, int verbosity) {
  ParsedScene ps = parse_config(config_path);
  const int trials = trials_override > 0 ? trials_override : ps.verify.trials;
  std::filesystem::create_directories(out_dir);

  VerifyTolerances tol;
  StructureReport rep =
      verify_structure(ps.scene.model, ps.scene.onsager, ps.scene.grid, trials, seed,
                       negative_controls, tol, ps.verify.corrupt);

  {
    std::ofstream csv(join(out_dir, "verify_report.csv"));
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "# tolerances: skew=%.3e nic1=%.3e nic2=%.3e rstar_null=%.3e jacobi=%.3e "
                  "negative_control=%.3e\n",
                  tol.skew, tol.nic1, tol.nic2, tol.rstar_null, tol.jacobi,
                  tol.negative_control);
    csv << buf;
    csv << "trial,condition,residual,tolerance,expect_fail,pass\n";
    for (const auto& r : rep.rows) {
      std::snprintf(buf, sizeof(buf), "%d,%s,%.17g,%.17g,%d,%d\n", r.trial,
                    r.condition.c_str(), r.residual, r.tolerance, r.expect_fail ? 1 : 0,
                    r.pass ? 1 : 0);
      csv << buf;
    }
  }
  {
    nlohmann::ordered_json j;
    j["tolerances"] = {{"skew", tol.skew},
                       {"nic1", tol.nic1},
                       {"nic2", tol.nic2},
                       {"rstar_null", tol.rstar_null},
                       {"jacobi", tol.jacobi},
                       {"negative_control", tol.negative_control}};
    j["trials"] = trials;
    j["seed"] = seed;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : rep.rows)
      rows.push_back({{"trial", r.trial},
                      {"condition", r.condition},
                      {"residual", r.residual},
                      {"tolerance", r.tolerance},
                      {"expect_fail", r.expect_fail},
                      {"pass", r.pass}});
    j["rows"] = std::move(rows);
    j["all_pass"] = rep.all_pass();
    std::ofstream js(join(out_dir, "verify_report.json"));
    js << j.dump(2) << "\n";
  }

  bool ok = rep.all_pass();
  if (verbosity > 0) {
    double worst = 0;
    for (const auto& r : rep.rows)
      if (!r.expect_fail) worst = std::max(worst, r.residual / r.tolerance);
    std::printf("verify: %zu checks, %s (worst residual/tolerance = %.3e)\n", rep.rows.size(),
                ok ? "all pass" : "FAILURES", worst);
    for (const auto& r : rep.rows)
      if (!r.pass)
        std::printf("  FAIL trial %d %s residual %.3e vs %.3e%s\n", r.trial,
                    r.condition.c_str(), r.residual, r.tolerance,
                    r.expect_fail ? " (negative control not detected)" : "");
  }

  if (appendix_a) {
    std::ofstream csv(join(out_dir, "appendix_a.csv"));
    csv << "# finite-dimensional block-Poisson certificate\n";
    csv << "check,value,threshold,pass\n";
    char buf[256];
    bool apass = true;
    auto row = [&](const std::string& name, double v, double thr, bool cmp_le) {
      const bool p = cmp_le ? v <= thr : v >= thr;
      apass = apass && p;
      std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%d\n", name.c_str(), v, thr, p ? 1 : 0);
      csv << buf;
    };
    BlockPoisson J = random_block_instance(2, 2, seed);
    BlockConditionsReport cr = check_conditions(J, trials, seed + 1);
    row("cond_a", cr.cond_a, cr.tol_a, true);
    row("cond_b", cr.cond_b, cr.tol_b, true);
    row("cond_c", cr.cond_c, cr.tol_c, true);
    EquivalenceReport er = equivalence_theorem_test(50, seed + 2);
    row("conforming_pass_fraction",
        static_cast<double>(er.conforming_pass) / er.conforming_total, 1.0, false);
    row("violating_flagged_fraction",
        static_cast<double>(er.violating_flagged) / er.violating_total, 49.0 / 50.0, false);
    if (verbosity > 0)
      std::printf("appendix-a: conforming %d/%d pass, violations flagged %d/%d, %s\n",
                  er.conforming_pass, er.conforming_total, er.violating_flagged,
                  er.violating_total, apass ? "pass" : "FAIL");
    ok = ok && apass;
  }
  return ok ? 0 : 1;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, bool seed_set,
                 uint64_t seed, int verbosity) {
  ParsedScene ps = parse_config(config_path);
  if (seed_set) ps.scene.init.seed = seed;
  std::filesystem::create_directories(out_dir);

  SceneConfig& cfg = ps.scene;
  RunResult res;
  const std::string diag_path = join(out_dir, "diagnostics.csv");
  std::ofstream csv(diag_path);
  csv << "t,E_tot,E_kin,S_tot,min_theta,min_detFe,res_energy_local,res_entropy_local\n";

  res.state = initial_state(cfg);
  std::string warn = cfl_warning(cfg, res.state);
  if (!warn.empty() && verbosity > 0) std::fprintf(stderr, "%s\n", warn.c_str());

  auto flush_row = [&](const DiagRow& row) {
    char buf[320];
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  row.t, row.E_tot, row.E_kin, row.S_tot, row.min_theta, row.min_detFe,
                  row.res_energy_local, row.res_entropy_local);
    csv << buf;
    csv.flush();
  };

  const int steps = static_cast<int>(std::llround(cfg.run.t_end / cfg.run.dt));
  flush_row(diagnostics(cfg, res.state, 0.0));
  if (cfg.run.snapshot_interval > 0)
    write_snapshot(join(out_dir, "state_000000.gen"), res.state, 0.0);
  for (int k = 0; k < steps; ++k) {
    try {
      res.grav_work += step(cfg, res.state);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "abort at step %d: %s\n", k + 1, e.what());
      return 3;
    }
    const double time = (k + 1) * cfg.run.dt;
    if (cfg.run.out_interval > 0 && ((k + 1) % cfg.run.out_interval == 0 || k + 1 == steps))
      flush_row(diagnostics(cfg, res.state, time));
    if (cfg.run.snapshot_interval > 0 && (k + 1) % cfg.run.snapshot_interval == 0) {
      char name[64];
      std::snprintf(name, sizeof(name), "state_%06d.gen", k + 1);
      write_snapshot(join(out_dir, name), res.state, time);
    }
  }
  if (verbosity > 0) std::printf("simulate: %d steps, diagnostics in %s\n", steps, diag_path.c_str());
  return 0;
}

int cmd_material_table(const std::string& config_path, const std::string& out_dir,
                       int verbosity) {
  ParsedScene ps = parse_config(config_path);
  if (!ps.is_mantle)
    throw ValidationError("material-table: model.kind must be mantle");
  std::filesystem::create_directories(out_dir);
  const MantleParams& mp = ps.mantle;
  MantleBulk bulk = build_mantle_bulk(mp);

  const int npts = 2000;
  const double j_lo = mp.j2_lo - mp.deep_width - 0.02;
  const double j_hi = mp.J_T + 0.05;
  {
    std::ofstream csv(join(out_dir, "pressure_vs_j.csv"));
    csv << "J,p,p_dtheta_plus,p_dtheta_minus\n";
    char buf[256];
    const double dth = 1.0;
    for (int i = 0; i < npts; ++i) {
      const double J = j_lo + (j_hi - j_lo) * i / (npts - 1);
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", J,
                    bulk.pressure(J, mp.theta_ref, mp.theta_ref),
                    bulk.pressure(J, mp.theta_ref + dth, mp.theta_ref),
                    bulk.pressure(J, mp.theta_ref - dth, mp.theta_ref));
      csv << buf;
    }
  }
  {
    std::ofstream csv(join(out_dir, "density_vs_p.csv"));
    csv << "p,rho\n";
    char buf[128];
    for (int i = 0; i < npts; ++i) {
      const double J = j_hi - (j_hi - j_lo) * i / (npts - 1);
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n",
                    bulk.pressure(J, mp.theta_ref, mp.theta_ref), mp.rho_ref / J);
      csv << buf;
    }
  }
  if (verbosity > 0) std::printf("material-table: curves written to %s\n", out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Eulerian finite-strain thermo-visco-elastoplasticity with diffusion: "
               "structure verification and simulation"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  uint64_t seed = 1;
  int trials = 0;
  int verbosity = 1;
  bool appendix_a = false, negative_controls = false;
  std::vector<CLI::Option*> seed_opts;

  auto add_common = [&](CLI::App* sub, bool need_config) {
    auto* opt = sub->add_option("--config", config_path, "scene configuration file");
    if (need_config) opt->required();
    sub->add_option("--out", out_dir, "output directory");
    seed_opts.push_back(sub->add_option("--seed", seed, "random seed"));
    sub->add_option("-v,--verbosity", verbosity, "0: quiet, 1: summary");
  };

  CLI::App* verify = app.add_subcommand("verify", "run the structural certificates");
  add_common(verify, true);
  verify->add_option("--trials", trials, "trials per condition (overrides verify.trials)");
  verify->add_flag("--appendix-a", appendix_a, "also run the finite-dimensional block lab");
  verify->add_flag("--negative-controls", negative_controls,
                   "include deliberately corrupted operators (must be flagged)");

  CLI::App* simulate = app.add_subcommand("simulate", "integrate the evolution");
  add_common(simulate, true);

  CLI::App* table = app.add_subcommand("material-table", "emit state-equation curves");
  add_common(table, true);

  CLI11_PARSE(app, argc, argv);

  bool seed_set = false;
  for (const auto* o : seed_opts) seed_set = seed_set || o->count() > 0;

  try {
    if (verify->parsed())
      return cmd_verify(config_path, out_dir, seed, trials, appendix_a, negative_controls,
                        verbosity);
    if (simulate->parsed())
      return cmd_simulate(config_path, out_dir, seed_set, seed, verbosity);
    if (table->parsed()) return cmd_material_table(config_path, out_dir, verbosity);
  } catch (const ParseError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const BlowUp& e) {
    std::fprintf(stderr, "runtime abort: %s\n", e.what());
    return 3;
  } catch (const Inadmissible& e) {
    std::fprintf(stderr, "runtime abort: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 2;
}
