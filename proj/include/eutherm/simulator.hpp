#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "eutherm/onsager.hpp"
#include "eutherm/poisson.hpp"
#include "eutherm/verify.hpp"

namespace eutherm {

enum class Integrator { RK4, Heun };

struct RunParams {
  Integrator integrator = Integrator::RK4;
  double dt = 1e-3;
  double t_end = 1e-1;
  double cfl = 0.25;              // advisory; violation warns, never errors
  ThermalGauge gauge = ThermalGauge::InternalEnergy;
  int s_ext = 1;                  // 1: diffusant z is extensive (beta slot)
  double gravity[3] = {0, 0, 0};
  double hyper_nu = 0.0;          // multipolar stabilization, off by default
  double hyper_p = 4.0;
  int out_interval = 10;
  int snapshot_interval = 0;      // 0: no snapshots
  bool dealias = true;
  uint64_t seed = 1;
};

struct InitParams {
  double v_amp = 0.0;
  double theta0 = 1.0;
  double theta_amp = 0.0;
  double fe_amp = 0.0;
  double fe_scale = 1.0;          // F_e = fe_scale * (I + fe_amp * smooth)
  double z0 = 0.0;                // active diffusant mean
  double z_amp = 0.0;
  double other0 = 0.0;            // the inactive scalar, held constant
  int kmax = 3;
  uint64_t seed = 7;
};

// The full scene: grid + constitutive model + dissipation + run/init settings.
struct SceneConfig {
  Grid grid;
  ThermoModel model;              // already in run.gauge
  OnsagerSpec onsager;
  RunParams run;
  InitParams init;
};

struct DiagRow {
  double t = 0;
  double E_tot = 0, E_kin = 0, S_tot = 0;
  double min_theta = 0, min_detFe = 0;
  double res_energy_local = 0;   // max pointwise residual of the local energy balance
  double res_entropy_local = 0;  // min pointwise entropy production
};

struct RunResult {
  std::vector<DiagRow> rows;
  int steps_done = 0;
  bool aborted = false;
  std::string abort_reason;
  double grav_work = 0;  // time-integrated gravity power, RK-consistent
  QFields state;
  std::vector<std::string> warnings;
};

inline QFields initial_state(const SceneConfig& cfg) {
  const Grid& g = cfg.grid;
  const int d = g.dim();
  QFields q(g);
  uint64_t s = cfg.init.seed * 104729ull;

  Field theta = scaled_smooth(g, cfg.init.kmax, ++s, cfg.init.theta_amp);
  for (auto& v : theta) v += cfg.init.theta0;

  Field z = scaled_smooth(g, cfg.init.kmax, ++s, cfg.init.z_amp);
  for (auto& v : z) v += cfg.init.z0;
  if (cfg.run.s_ext == 1) {
    q.beta = std::move(z);
    q.alpha.assign(g.num_points(), cfg.init.other0);
  } else {
    q.alpha = std::move(z);
    q.beta.assign(g.num_points(), cfg.init.other0);
  }

  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Field f = scaled_smooth(g, cfg.init.kmax, ++s, cfg.init.fe_amp * cfg.init.fe_scale);
      if (i == j)
        for (auto& v : f) v += cfg.init.fe_scale;
      q.Fe[static_cast<size_t>(i) * d + j] = std::move(f);
    }

  std::vector<Field> vel(d);
  for (int i = 0; i < d; ++i) vel[i] = scaled_smooth(g, cfg.init.kmax, ++s, cfg.init.v_amp);

  const double rho_r = cfg.model.rho_ref();
  ThermoModel m_theta = cfg.model.with_gauge(ThermalGauge::Temperature);
  parallel_for(g.num_points(), [&](size_t id) {
    StateLocal ql = q.at(id);
    ql.w = theta[id];
    const double rho = rho_r / det(ql.Fe);
    for (int i = 0; i < d; ++i) ql.p[i] = rho * vel[i][id];
    switch (cfg.model.gauge()) {
      case ThermalGauge::Temperature: break;
      case ThermalGauge::InternalEnergy: ql.w = m_theta.triple(ql).e; break;
      case ThermalGauge::Entropy: ql.w = m_theta.triple(ql).s; break;
    }
    q.set(id, ql);
  });
  return q;
}

struct RhsResult {
  QFields dq;
  double grav_power = 0;  // int rho g . v dx
};

inline void add_hyperviscosity(const SceneConfig& cfg, const QFields& q, const ThermoFields& t,
                               QFields& dq);

// d/dt q = V_Ham + V_irr + gravity (+ optional hyperviscous stabilization)
inline RhsResult rhs(const SceneConfig& cfg, const QFields& q) {
  const Grid& g = q.grid;
  const int d = g.dim();
  const size_t n = g.num_points();
  ThermoFields t = thermo_fields(cfg.model, q);

  RhsResult r{v_ham_simplified_with(cfg.model, q, t), 0.0};
  if (!cfg.onsager.diss.all_zero()) {
    QFields vi = v_irr(cfg.model, cfg.onsager, q, t);
    axpy(r.dq, 1.0, vi);
  }

  bool has_g = false;
  for (int i = 0; i < d; ++i) has_g = has_g || cfg.run.gravity[i] != 0.0;
  if (has_g) {
    Field work(n, 0.0);
    for (int i = 0; i < d; ++i) {
      const double gi = cfg.run.gravity[i];
      if (gi == 0.0) continue;
      for (size_t p = 0; p < n; ++p) {
        r.dq.p[i][p] += t.rho[p] * gi;
        work[p] += t.rho[p] * gi * t.v[i][p];
      }
    }
    r.grav_power = g.integrate(work);
  }

  if (cfg.run.hyper_nu > 0) add_hyperviscosity(cfg, q, t, r.dq);
  return r;
}

struct LocalBalance {
  double res_energy = 0;   // max normalized residual of the local energy balance
  double res_entropy = 0;  // min pointwise entropy production
};

// Local balance diagnostics evaluated against the assembled rates.
inline LocalBalance local_balances(const SceneConfig& cfg, const QFields& q,
                                   const ThermoFields& t, const QFields& dq) {
  const Grid& g = q.grid;
  const int d = g.dim();
  const size_t n = g.num_points();

  // de/dt by the chain rule through the current gauge
  Field dedt(n, 0.0);
  for (size_t id = 0; id < n; ++id) {
    double acc = t.E_w[id] * dq.w[id] + t.E_a[id] * dq.alpha[id] + t.E_b[id] * dq.beta[id];
    for (int c = 0; c < d * d; ++c) acc += t.E_Fe[c][id] * dq.Fe[c][id];
    dedt[id] = acc;
  }
  Field dive_v = lie_dform(g, t.v, t.E);

  // p_mech = (Sigma_Cauchy - beta mu^b I + D_visc D) : D
  std::vector<Field> D = sym_grad(g, t.v);
  Field pmech(n, 0.0);
  parallel_for(n, [&](size_t id) {
    Tensor2 Dl(d), efe(d), sfe(d), fe(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        Dl(i, j) = D[static_cast<size_t>(i) * d + j][id];
        efe(i, j) = t.E_Fe[static_cast<size_t>(i) * d + j][id];
        sfe(i, j) = t.S_Fe[static_cast<size_t>(i) * d + j][id];
        fe(i, j) = q.Fe[static_cast<size_t>(i) * d + j][id];
      }
    const double th = t.theta[id];
    Tensor2 sig = matmul(efe - th * sfe, transpose(fe));
    const double psi = t.E[id] - th * t.S[id];
    const double pb = q.beta[id] * (t.E_b[id] - th * t.S_b[id]);
    for (int i = 0; i < d; ++i) sig(i, i) += psi - pb;
    sig += cfg.onsager.diss.visc_action(Dl);
    pmech[id] = ddot(sig, Dl);
  });

  // div j_ener = div(K_heat grad(1/Theta))
  Field inv_th(n);
  for (size_t i = 0; i < n; ++i) inv_th[i] = 1.0 / t.theta[i];
  Field divj = g.zeros();
  for (int ax = 0; ax < d; ++ax) {
    Field df = g.deriv(inv_th, ax);
    for (auto& v : df) v *= cfg.onsager.diss.heat_k;
    Field dd = g.deriv(df, ax);
    for (size_t i = 0; i < n; ++i) divj[i] += dd[i];
  }

  LocalBalance lb;
  double scale = 1e-300;
  for (size_t i = 0; i < n; ++i)
    scale = std::max({scale, std::abs(pmech[i]), std::abs(dive_v[i]), std::abs(dedt[i])});
  for (size_t i = 0; i < n; ++i) {
    // de/dt + div(e v) = p_mech - div j_ener with j_ener = K grad(1/Theta)
    const double res = dedt[i] + dive_v[i] - pmech[i] + divj[i];
    lb.res_energy = std::max(lb.res_energy, std::abs(res) / scale);
  }

  Field sig = entropy_production(cfg.model, cfg.onsager, q, t);
  double smin = 0, sscale = 1e-300;
  for (double v : sig) sscale = std::max(sscale, std::abs(v));
  for (double v : sig) smin = std::min(smin, v / sscale);
  lb.res_entropy = smin;
  return lb;
}

inline DiagRow diagnostics(const SceneConfig& cfg, const QFields& q, double time) {
  const Grid& g = q.grid;
  const int d = g.dim();
  const size_t n = g.num_points();
  ThermoFields t = thermo_fields(cfg.model, q);
  DiagRow row;
  row.t = time;
  Field ekin(n), etot(n);
  double min_th = 1e300, min_j = 1e300;
  for (size_t i = 0; i < n; ++i) {
    double p2 = 0;
    for (int c = 0; c < d; ++c) p2 += q.p[c][i] * q.p[c][i];
    ekin[i] = 0.5 * p2 / t.rho[i];
    etot[i] = ekin[i] + t.E[i];
    min_th = std::min(min_th, t.theta[i]);
  }
  for (size_t i = 0; i < n; ++i) {
    const StateLocal ql = q.at(i);
    min_j = std::min(min_j, det(ql.Fe));
  }
  row.E_kin = g.integrate(ekin);
  row.E_tot = g.integrate(etot);
  row.S_tot = g.integrate(t.S);
  row.min_theta = min_th;
  row.min_detFe = min_j;
  RhsResult rr = rhs(cfg, q);
  LocalBalance lb = local_balances(cfg, q, t, rr.dq);
  row.res_energy_local = lb.res_energy;
  row.res_entropy_local = lb.res_entropy;
  return row;
}

inline void guard_state(const QFields& q) {
  for (const Field* f : q.components())
    for (double v : *f) {
      if (!std::isfinite(v)) throw BlowUp("non-finite field value");
      if (std::abs(v) > 1e100) throw BlowUp("field value beyond overflow guard");
    }
  const int d = q.dim();
  for (size_t i = 0; i < q.grid.num_points(); ++i) {
    Tensor2 fe(d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) fe(a, b) = q.Fe[static_cast<size_t>(a) * d + b][i];
    if (!(det(fe) > 0)) throw Inadmissible("det Fe <= 0");
  }
}

// one integrator step; returns the gravity work increment. Constitutive
// failures at stage states (nonpositive temperature, thermal coordinate
// leaving the admissible range) surface as Inadmissible.
inline double step(const SceneConfig& cfg, QFields& q) {
  const double dt = cfg.run.dt;
  double wsum = 0;
  try {
    if (cfg.run.integrator == Integrator::RK4) {
      RhsResult k1 = rhs(cfg, q);
      RhsResult k2 = rhs(cfg, combo(q, 0.5 * dt, k1.dq));
      RhsResult k3 = rhs(cfg, combo(q, 0.5 * dt, k2.dq));
      RhsResult k4 = rhs(cfg, combo(q, dt, k3.dq));
      axpy(q, dt / 6.0, k1.dq);
      axpy(q, dt / 3.0, k2.dq);
      axpy(q, dt / 3.0, k3.dq);
      axpy(q, dt / 6.0, k4.dq);
      wsum = dt / 6.0 * (k1.grav_power + 2 * k2.grav_power + 2 * k3.grav_power + k4.grav_power);
    } else {
      RhsResult k1 = rhs(cfg, q);
      RhsResult k2 = rhs(cfg, combo(q, dt, k1.dq));
      axpy(q, 0.5 * dt, k1.dq);
      axpy(q, 0.5 * dt, k2.dq);
      wsum = 0.5 * dt * (k1.grav_power + k2.grav_power);
    }
  } catch (const NonpositiveTemperature& e) {
    throw Inadmissible(std::string("Theta <= 0 during step: ") + e.what());
  } catch (const RootFindFailure& e) {
    throw Inadmissible(std::string("thermal coordinate left the admissible range: ") +
                       e.what());
  }
  if (cfg.run.dealias) {
    for (Field* f : q.components()) *f = q.grid.dealias(*f);
  }
  guard_state(q);
  return wsum;
}

// advisory CFL estimate
inline std::string cfl_warning(const SceneConfig& cfg, const QFields& q) {
  const Grid& g = q.grid;
  ThermoFields t = thermo_fields(cfg.model, q);
  double vmax = 0, rho_min = 1e300;
  for (int i = 0; i < g.dim(); ++i)
    for (double v : t.v[i]) vmax = std::max(vmax, std::abs(v));
  for (double r : t.rho) rho_min = std::min(rho_min, r);
  const double c = vmax + std::sqrt(cfg.model.core().stiffness_hint() / rho_min);
  const double dt_cfl = cfg.run.cfl * g.spacing() / std::max(c, 1e-300);
  if (cfg.run.dt > dt_cfl) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "warning: dt = %.3e exceeds CFL estimate %.3e (wave speed %.3e)",
                  cfg.run.dt, dt_cfl, c);
    return buf;
  }
  return {};
}

inline RunResult run(const SceneConfig& cfg) {
  RunResult res;
  res.state = initial_state(cfg);
  std::string warn = cfl_warning(cfg, res.state);
  if (!warn.empty()) res.warnings.push_back(warn);

  const int steps = static_cast<int>(std::llround(cfg.run.t_end / cfg.run.dt));
  res.rows.push_back(diagnostics(cfg, res.state, 0.0));
  for (int k = 0; k < steps; ++k) {
    try {
      res.grav_work += step(cfg, res.state);
    } catch (const std::exception& e) {
      res.aborted = true;
      res.abort_reason = e.what();
      break;
    }
    ++res.steps_done;
    const double time = (k + 1) * cfg.run.dt;
    if (cfg.run.out_interval > 0 &&
        ((k + 1) % cfg.run.out_interval == 0 || k + 1 == steps))
      res.rows.push_back(diagnostics(cfg, res.state, time));
  }
  return res;
}

// --------------------------------------------------------------------------
// Inelastic-distortion tracking: integrates dFp/dt = -(v.grad)Fp + Lp Fp and
// a direct deformation-gradient field dF/dt = -(v.grad)F + (grad v) F next to
// the state, then compares F against Fe Fp.
// --------------------------------------------------------------------------
struct SplitTracking {
  double max_detFp_drift = 0;   // max |det Fp - 1|
  double split_residual = 0;    // ||Fe Fp - F_direct|| / scale at t_end
  double rate_residual = 0;     // instantaneous d/dt(Fe Fp) vs transport of F
};

inline std::vector<Field> lp_fields(const SceneConfig& cfg, const QFields& q,
                                    const ThermoFields& t) {
  const Grid& g = q.grid;
  const int d = g.dim();
  std::vector<Field> lp(static_cast<size_t>(d) * d, g.zeros());
  parallel_for(g.num_points(), [&](size_t id) {
    Tensor2 efe(d), sfe(d), fe(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        efe(i, j) = t.E_Fe[static_cast<size_t>(i) * d + j][id];
        sfe(i, j) = t.S_Fe[static_cast<size_t>(i) * d + j][id];
        fe(i, j) = q.Fe[static_cast<size_t>(i) * d + j][id];
      }
    const double th = t.theta[id];
    const Tensor2 mandel = matmul(transpose(fe), efe - th * sfe);
    const Tensor2 l = lp_local(cfg.onsager.diss, mandel, th);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) lp[static_cast<size_t>(i) * d + j][id] = l(i, j);
  });
  return lp;
}

inline SplitTracking track_inelastic_distortion(const SceneConfig& cfg, int steps);

}  // namespace eutherm

// ---- implementation of the forward-declared pieces ----
namespace eutherm {

inline void add_hyperviscosity(const SceneConfig& cfg, const QFields& q, const ThermoFields& t,
                               QFields& dq) {
  const Grid& g = q.grid;
  const int d = g.dim();
  const size_t n = g.num_points();
  const double nu = cfg.run.hyper_nu, pexp = cfg.run.hyper_p;

  // H_{ijk} = d_j d_k v_i
  std::vector<Field> H(static_cast<size_t>(d) * d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Field dj = g.deriv(t.v[i], j);
      for (int k = 0; k < d; ++k)
        H[(static_cast<size_t>(i) * d + j) * d + k] = g.deriv(dj, k);
    }
  Field mag(n, 0.0);
  for (const auto& h : H)
    for (size_t p = 0; p < n; ++p) mag[p] += h[p] * h[p];
  Field amp(n);
  for (size_t p = 0; p < n; ++p) amp[p] = nu * std::pow(mag[p], 0.5 * (pexp - 2.0));

  // momentum: -d_j d_k (amp * H_{ijk}); heat row: + amp |H|^2 / E'_w
  for (int i = 0; i < d; ++i) {
    Field acc = g.zeros();
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        Field tjk = H[(static_cast<size_t>(i) * d + j) * d + k];
        for (size_t p = 0; p < n; ++p) tjk[p] *= amp[p];
        Field dd = g.deriv(g.deriv(tjk, j), k);
        for (size_t p = 0; p < n; ++p) acc[p] += dd[p];
      }
    for (size_t p = 0; p < n; ++p) dq.p[i][p] -= acc[p];
  }
  for (size_t p = 0; p < n; ++p) dq.w[p] += amp[p] * mag[p] / t.E_w[p];
}

inline SplitTracking track_inelastic_distortion(const SceneConfig& cfg, int steps) {
  const Grid& g = cfg.grid;
  const int d = g.dim();
  const size_t n = g.num_points();
  QFields q = initial_state(cfg);

  std::vector<Field> Fp(static_cast<size_t>(d) * d, g.zeros());
  for (int i = 0; i < d; ++i) Fp[static_cast<size_t>(i) * d + i].assign(n, 1.0);
  std::vector<Field> Fd = q.Fe;  // F = Fe Fp = Fe at t=0

  struct Ext {
    QFields q;
    std::vector<Field> fp, fd;
  };
  auto rate = [&](const Ext& s) {
    Ext r;
    RhsResult rr = rhs(cfg, s.q);
    r.q = std::move(rr.dq);
    ThermoFields t = thermo_fields(cfg.model, s.q);
    std::vector<Field> lp = lp_fields(cfg, s.q, t);
    // dFp = -(v.grad)Fp + Lp Fp ; dF = -(v.grad)F + (grad v) F
    r.fp.assign(static_cast<size_t>(d) * d, g.zeros());
    r.fd.assign(static_cast<size_t>(d) * d, g.zeros());
    for (int c = 0; c < d * d; ++c) {
      Field adv_p = lie_0form(g, t.v, s.fp[c]);
      Field adv_d = lie_0form(g, t.v, s.fd[c]);
      for (size_t p = 0; p < n; ++p) {
        r.fp[c][p] = -adv_p[p];
        r.fd[c][p] = -adv_d[p];
      }
    }
    std::vector<Field> gradv(static_cast<size_t>(d) * d);
    for (int i = 0; i < d; ++i)
      for (int l = 0; l < d; ++l) gradv[static_cast<size_t>(i) * d + l] = g.deriv(t.v[i], l);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int l = 0; l < d; ++l)
          for (size_t p = 0; p < n; ++p) {
            r.fp[static_cast<size_t>(i) * d + j][p] +=
                lp[static_cast<size_t>(i) * d + l][p] * s.fp[static_cast<size_t>(l) * d + j][p];
            r.fd[static_cast<size_t>(i) * d + j][p] +=
                gradv[static_cast<size_t>(i) * d + l][p] *
                s.fd[static_cast<size_t>(l) * d + j][p];
          }
    return r;
  };
  auto axpy_ext = [&](Ext& y, double c, const Ext& x) {
    axpy(y.q, c, x.q);
    for (int k = 0; k < d * d; ++k)
      for (size_t p = 0; p < n; ++p) {
        y.fp[k][p] += c * x.fp[k][p];
        y.fd[k][p] += c * x.fd[k][p];
      }
  };
  auto combo_ext = [&](const Ext& y, double c, const Ext& x) {
    Ext r = y;
    axpy_ext(r, c, x);
    return r;
  };

  Ext s{std::move(q), std::move(Fp), std::move(Fd)};
  const double dt = cfg.run.dt;
  SplitTracking out;

  // instantaneous rate identity at t=0:
  // d/dt(Fe Fp) + (v.grad)(Fe Fp) - (grad v)(Fe Fp) should vanish
  {
    Ext r = rate(s);
    ThermoFields t = thermo_fields(cfg.model, s.q);
    std::vector<Field> gradv(static_cast<size_t>(d) * d);
    for (int i = 0; i < d; ++i)
      for (int l = 0; l < d; ++l) gradv[static_cast<size_t>(i) * d + l] = g.deriv(t.v[i], l);
    std::vector<Field> prod(static_cast<size_t>(d) * d, g.zeros());
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int l = 0; l < d; ++l)
          for (size_t p = 0; p < n; ++p)
            prod[static_cast<size_t>(i) * d + j][p] +=
                s.q.Fe[static_cast<size_t>(i) * d + l][p] * s.fp[static_cast<size_t>(l) * d + j][p];
    double scale = 1e-300;
    for (const auto& c : gradv)
      for (size_t p = 0; p < n; ++p) scale = std::max(scale, std::abs(c[p]));
    for (const auto& c : prod)
      for (size_t p = 0; p < n; ++p) scale = std::max(scale, std::abs(c[p]));
    double worst = 0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        Field adv = lie_0form(g, t.v, prod[static_cast<size_t>(i) * d + j]);
        for (size_t p = 0; p < n; ++p) {
          double dprod = 0, gvprod = 0;
          for (int l = 0; l < d; ++l) {
            dprod += r.q.Fe[static_cast<size_t>(i) * d + l][p] * s.fp[static_cast<size_t>(l) * d + j][p] +
                     s.q.Fe[static_cast<size_t>(i) * d + l][p] * r.fp[static_cast<size_t>(l) * d + j][p];
            gvprod += gradv[static_cast<size_t>(i) * d + l][p] * prod[static_cast<size_t>(l) * d + j][p];
          }
          worst = std::max(worst, std::abs(dprod + adv[p] - gvprod) / (scale * scale));
        }
      }
    out.rate_residual = worst;
  }

  for (int k = 0; k < steps; ++k) {
    Ext k1 = rate(s);
    Ext k2 = rate(combo_ext(s, 0.5 * dt, k1));
    Ext k3 = rate(combo_ext(s, 0.5 * dt, k2));
    Ext k4 = rate(combo_ext(s, dt, k3));
    axpy_ext(s, dt / 6.0, k1);
    axpy_ext(s, dt / 3.0, k2);
    axpy_ext(s, dt / 3.0, k3);
    axpy_ext(s, dt / 6.0, k4);
    guard_state(s.q);
  }

  // det Fp drift and split consistency
  double scale = 1e-300;
  for (size_t p = 0; p < n; ++p) {
    Tensor2 fp(d), fe(d), fd(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const size_t c = static_cast<size_t>(i) * d + j;
        fp(i, j) = s.fp[c][p];
        fe(i, j) = s.q.Fe[c][p];
        fd(i, j) = s.fd[c][p];
      }
    out.max_detFp_drift = std::max(out.max_detFp_drift, std::abs(det(fp) - 1.0));
    const Tensor2 rec = matmul(fe, fp);
    scale = std::max(scale, frob(fd));
    out.split_residual = std::max(out.split_residual, frob(rec - fd));
  }
  out.split_residual /= scale;
  return out;
}

}  // namespace eutherm
