#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eutherm/onsager.hpp"
#include "eutherm/poisson.hpp"

namespace eutherm {

// Tolerances for the structural certificates. All of them are printed in the
// report header; none are adjusted at runtime.
struct VerifyTolerances {
  double skew = 1e-10;
  double nic1 = 1e-8;
  double nic2 = 1e-12;
  double rstar_null = 1e-18;   // R*(q, lambda DE), relative to R*(q, DS)
  double jacobi = 1e-6;
  double negative_control = 1e-3;  // corrupted operators must exceed this
};

struct TrialResult {
  int trial = 0;
  std::string condition;
  double residual = 0;
  double tolerance = 0;
  bool expect_fail = false;  // negative control: pass means residual ABOVE tol
  bool pass = false;
};

// deterministic band-limited scalar with a prescribed max amplitude
inline Field scaled_smooth(const Grid& g, int kmax, uint64_t seed, double amp) {
  Field f = g.random_smooth(kmax, seed);
  double m = 0;
  for (double v : f) m = std::max(m, std::abs(v));
  const double c = m > 0 ? amp / m : 0.0;
  for (auto& v : f) v *= c;
  return f;
}

// Random admissible band-limited state for a model, in the model's gauge.
// Fields sit well inside the model's admissible box.
inline QFields random_state(const ThermoModel& m, const Grid& g, int kmax, uint64_t seed,
                            double rel_amp = 0.5) {
  const AdmissibleBox bx = m.box();
  const int d = g.dim();
  QFields q(g);
  uint64_t s = seed * 1000003ull;

  const double th_mid = std::sqrt(bx.theta_min * bx.theta_max);
  const double th_amp = rel_amp * 0.25 * std::min(th_mid - bx.theta_min, bx.theta_max - th_mid);
  Field theta = scaled_smooth(g, kmax, ++s, th_amp);
  for (auto& v : theta) v += th_mid;

  const double a_mid = 0.5 * (bx.alpha_min + bx.alpha_max);
  const double a_amp = rel_amp * 0.3 * (bx.alpha_max - bx.alpha_min) * 0.5;
  q.alpha = scaled_smooth(g, kmax, ++s, a_amp);
  for (auto& v : q.alpha) v += a_mid;

  const double b_mid = 0.5 * (bx.beta_min + bx.beta_max);
  const double b_amp = rel_amp * 0.3 * (bx.beta_max - bx.beta_min) * 0.5;
  q.beta = scaled_smooth(g, kmax, ++s, b_amp);
  for (auto& v : q.beta) v += b_mid;

  // F_e = J_mid^{1/d} (I + perturbation), perturbation small enough to keep
  // det Fe inside the box
  const double j_mid = std::sqrt(bx.detFe_min * bx.detFe_max);
  const double scale = std::pow(j_mid, 1.0 / d);
  const double fe_amp = rel_amp * 0.1;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Field f = scaled_smooth(g, kmax, ++s, fe_amp * scale);
      if (i == j)
        for (auto& v : f) v += scale;
      q.Fe[static_cast<size_t>(i) * d + j] = std::move(f);
    }

  // momentum from a modest velocity field
  const double v_amp = rel_amp * 0.2;
  std::vector<Field> vel(d);
  for (int i = 0; i < d; ++i) vel[i] = scaled_smooth(g, kmax, ++s, v_amp);
  const double rho_r = m.rho_ref();
  ThermoModel m_theta = m.with_gauge(ThermalGauge::Temperature);
  parallel_for(g.num_points(), [&](size_t id) {
    StateLocal ql = q.at(id);
    ql.w = theta[id];
    const double rho = rho_r / det(ql.Fe);
    for (int i = 0; i < d; ++i) ql.p[i] = rho * vel[i][id];
    // convert the thermal coordinate into the model's own gauge
    switch (m.gauge()) {
      case ThermalGauge::Temperature: break;
      case ThermalGauge::InternalEnergy: ql.w = m_theta.triple(ql).e; break;
      case ThermalGauge::Entropy: ql.w = m_theta.triple(ql).s; break;
    }
    q.set(id, ql);
  });
  return q;
}

inline ZFields random_cotangent(const Grid& g, int kmax, uint64_t seed, double amp = 1.0) {
  ZFields z(g);
  uint64_t s = seed * 2000003ull;
  const int d = g.dim();
  for (int i = 0; i < d; ++i) z.zp[i] = scaled_smooth(g, kmax, ++s, amp);
  for (int c = 0; c < d * d; ++c) z.zFe[c] = scaled_smooth(g, kmax, ++s, amp);
  z.za = scaled_smooth(g, kmax, ++s, amp);
  z.zb = scaled_smooth(g, kmax, ++s, amp);
  z.zw = scaled_smooth(g, kmax, ++s, amp);
  return z;
}

// |<z1, J z2> + <z2, J z1>| / (|z1||Jz2| + |z2||Jz1|)
inline double skew_residual(const PoissonApply& P, const ZFields& z1, const ZFields& z2) {
  QFields j2 = P.apply(z2);
  QFields j1 = P.apply(z1);
  const double num = std::abs(pair_fields(z1, j2) + pair_fields(z2, j1));
  const double den =
      field_norm(z1) * field_norm(j2) + field_norm(z2) * field_norm(j1) + 1e-300;
  return num / den;
}

// ||J DS|| relative to the magnitude of the terms that have to cancel
// (J applied to DS with the thermal slot suppressed).
inline double nic1_residual(const PoissonApply& P) {
  ThermoFields t = thermo_fields(P.model(), P.state());
  ZFields ds = ds_fields(P.model(), P.state(), t);
  QFields jds = P.apply(ds);
  ZFields ds_now = ds;
  ds_now.zw = P.grid().zeros();
  QFields ref = P.apply(ds_now);
  const double den = field_norm(ref) + 1e-300;
  return field_norm(jds) / den;
}

struct Nic2Result {
  double force_residual = 0;   // max normalized pointwise deviation from (0,...,0,1)
  double rstar_max = 0;        // max over lambda of R*(q, lambda DE) / R*(q, DS)
};

inline Nic2Result nic2_residual(const ThermoModel& m, const OnsagerSpec& spec,
                                const QFields& q) {
  const Grid& g = q.grid;
  const int d = g.dim();
  const size_t n = g.num_points();
  ThermoFields t = thermo_fields(m, q);
  ZFields de = de_fields(m, q, t);
  RFields s = ne_star(m, q, de, t);

  // scales of the cancelling contributions
  std::vector<Field> Dv = sym_grad(g, t.v);
  double sp_scale = 0, sfe_scale = 0, sa_scale = 0, sb_scale = 0;
  for (const auto& f : Dv)
    for (double v : f) sp_scale = std::max(sp_scale, std::abs(v));
  for (size_t id = 0; id < n; ++id) {
    Tensor2 fe(d), zfe(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        fe(i, j) = q.Fe[static_cast<size_t>(i) * d + j][id];
        zfe(i, j) = de.zFe[static_cast<size_t>(i) * d + j][id];
      }
    sfe_scale = std::max(sfe_scale, max_abs(matmul(transpose(fe), zfe)));
    sa_scale = std::max(sa_scale, std::abs(t.E_a[id]));
    sb_scale = std::max(sb_scale, std::abs(t.E_b[id]));
  }
  sp_scale = std::max(sp_scale, 1e-300);
  sfe_scale = std::max(sfe_scale, 1e-300);
  sa_scale = std::max(sa_scale, 1e-30 * sfe_scale + 1e-300);
  sb_scale = std::max(sb_scale, 1e-30 * sfe_scale + 1e-300);

  Nic2Result r;
  for (const auto& f : s.sp)
    for (double v : f) r.force_residual = std::max(r.force_residual, std::abs(v) / sp_scale);
  for (const auto& f : s.sFe)
    for (double v : f) r.force_residual = std::max(r.force_residual, std::abs(v) / sfe_scale);
  for (double v : s.sa) r.force_residual = std::max(r.force_residual, std::abs(v) / sa_scale);
  for (double v : s.sb) r.force_residual = std::max(r.force_residual, std::abs(v) / sb_scale);
  for (double v : s.sw) r.force_residual = std::max(r.force_residual, std::abs(v - 1.0));

  // R*(q, lambda DE) must vanish for every lambda
  ZFields dsz = ds_fields(m, q, t);
  RFields sds = ne_star(m, q, dsz, t);
  const double ref = dual_dissipation_value(spec, m, q, sds, t).total;
  const double den = std::max(std::abs(ref), 1e-300);
  for (double lambda : {-1.0, 0.5, 3.0}) {
    ZFields scaled = de;
    for (auto& f : scaled.zp)
      for (auto& v : f) v *= lambda;
    for (auto& f : scaled.zFe)
      for (auto& v : f) v *= lambda;
    for (Field* f : {&scaled.za, &scaled.zb, &scaled.zw})
      for (auto& v : *f) v *= lambda;
    RFields sl = ne_star(m, q, scaled, t);
    const double val = dual_dissipation_value(spec, m, q, sl, t).total;
    r.rstar_max = std::max(r.rstar_max, std::abs(val) / den);
  }
  return r;
}

// FD-based Jacobi trilinear residual:
//   |<z1, DJ(q)[J z2] z3> + cyc| / max |term|
// The state-direction step is h_rel * |q| along the normalized tangent.
inline double jacobi_residual(const ThermoModel& m, const QFields& q, const ZFields& z1,
                              const ZFields& z2, const ZFields& z3, double h_rel = 1e-6,
                              PoissonCorruption corrupt = PoissonCorruption::None) {
  PoissonApply P(m, q, corrupt);
  const double qn = std::max(field_norm(q), 1.0);
  const double h = h_rel * qn;

  auto term = [&](const ZFields& za, const ZFields& zb, const ZFields& zc) {
    QFields delta = P.apply(zb);
    const double dn = field_norm(delta);
    if (!(dn > 0)) return 0.0;
    QFields qp = combo(q, h / dn, delta);
    QFields qm = combo(q, -h / dn, delta);
    PoissonApply Pp(m, qp, corrupt);
    PoissonApply Pm(m, qm, corrupt);
    QFields jp = Pp.apply(zc);
    QFields jm = Pm.apply(zc);
    axpy(jp, -1.0, jm);
    return pair_fields(za, jp) * (dn / (2.0 * h));
  };

  const double t1 = term(z1, z2, z3);
  const double t2 = term(z2, z3, z1);
  const double t3 = term(z3, z1, z2);
  const double den = std::max({std::abs(t1), std::abs(t2), std::abs(t3)});
  if (den < 1e-300) return 0.0;
  return std::abs(t1 + t2 + t3) / den;
}

struct StructureReport {
  VerifyTolerances tol;
  std::vector<TrialResult> rows;
  bool all_pass() const {
    for (const auto& r : rows)
      if (!r.pass) return false;
    return true;
  }
};

// Full structural certificate for one model on one grid. A corruption other
// than None sabotages the operator under test; the standard rows then fail,
// which is exactly what a negative-control configuration wants to see.
inline StructureReport verify_structure(const ThermoModel& model, const OnsagerSpec& spec,
                                        const Grid& g, int trials, uint64_t seed,
                                        bool negative_controls = false,
                                        const VerifyTolerances& tol = {},
                                        PoissonCorruption corrupt = PoissonCorruption::None) {
  StructureReport rep;
  rep.tol = tol;
  const int kmax = std::max(2, g.n() / 16);

  auto push = [&rep](int trial, const std::string& cond, double res, double tolv,
                     bool expect_fail = false) {
    TrialResult r;
    r.trial = trial;
    r.condition = cond;
    r.residual = res;
    r.tolerance = tolv;
    r.expect_fail = expect_fail;
    r.pass = expect_fail ? res > tolv : res <= tolv;
    rep.rows.push_back(r);
  };

  for (int tr = 0; tr < trials; ++tr) {
    const uint64_t s = seed + 7919ull * tr;

    // skew-symmetry, entropy gauge state
    {
      ThermoModel ms = model.with_gauge(ThermalGauge::Entropy);
      QFields q = random_state(ms, g, kmax, s);
      PoissonApply P(ms, q, corrupt);
      ZFields z1 = random_cotangent(g, kmax, s + 1);
      ZFields z2 = random_cotangent(g, kmax, s + 2);
      push(tr, "skew", skew_residual(P, z1, z2), tol.skew);
    }

    // NIC1 in every gauge
    for (ThermalGauge gg : {ThermalGauge::Temperature, ThermalGauge::InternalEnergy,
                            ThermalGauge::Entropy}) {
      ThermoModel mg = model.with_gauge(gg);
      QFields q = random_state(mg, g, kmax, s + 3);
      PoissonApply P(mg, q, corrupt);
      push(tr, std::string("nic1_") + gauge_name(gg), nic1_residual(P), tol.nic1);
    }

    // NIC2 (reduced forces at DE, and R* on the DE ray)
    {
      ThermoModel mt = model.with_gauge(ThermalGauge::Temperature);
      QFields q = random_state(mt, g, kmax, s + 4);
      Nic2Result n2 = nic2_residual(mt, spec, q);
      push(tr, "nic2_forces", n2.force_residual, tol.nic2);
      push(tr, "nic2_rstar", n2.rstar_max, tol.rstar_null);
    }

    // Jacobi identity, entropy gauge (operator affine in the state there)
    {
      ThermoModel ms = model.with_gauge(ThermalGauge::Entropy);
      QFields q = random_state(ms, g, kmax, s + 5);
      ZFields z1 = random_cotangent(g, kmax, s + 6);
      ZFields z2 = random_cotangent(g, kmax, s + 7);
      ZFields z3 = random_cotangent(g, kmax, s + 8);
      push(tr, "jacobi", jacobi_residual(ms, q, z1, z2, z3, 1e-6, corrupt), tol.jacobi);
      if (negative_controls) {
        push(tr, "jacobi_flip_jpb",
             jacobi_residual(ms, q, z1, z2, z3, 1e-6, PoissonCorruption::FlipJpBeta),
             tol.negative_control, /*expect_fail=*/true);
        PoissonApply Pc(ms, q, PoissonCorruption::FlipJpBeta);
        push(tr, "skew_flip_jpb", skew_residual(Pc, z1, z2), tol.negative_control,
             /*expect_fail=*/true);
      }
    }
  }
  return rep;
}

}  // namespace eutherm
