#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "eutherm/materials.hpp"
#include "eutherm/state_eval.hpp"

namespace eutherm {

// Cross-coupled dual-potential hook: R*_extra(q, s) as a value plus its L2
// gradient in s. Anything supplied here rides along with the block-diagonal
// potentials but is NOT covered by the second non-interaction condition
// automatically; the NIC2 certificate evaluates it and flags violations.
struct RStarHook {
  std::function<double(const QFields&, const RFields&, const ThermoFields&)> value;
  std::function<RFields(const QFields&, const RFields&, const ThermoFields&)> grad;
};

// Onsager data: the dissipation coefficients plus the fixed deviatoric
// restriction M = dev o sym applied to the Mandel stress in the plastic law.
struct OnsagerSpec {
  DissipationSpec diss;
  std::shared_ptr<const RStarHook> hook;
};

inline Tensor2 devsym(const Tensor2& a) { return dev(sym(a)); }

// symmetric gradient of a vector field, as d*d component fields
inline std::vector<Field> sym_grad(const Grid& g, const std::vector<Field>& u) {
  const int d = g.dim();
  std::vector<Field> du(static_cast<size_t>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) du[static_cast<size_t>(i) * d + j] = g.deriv(u[i], j);
  std::vector<Field> s(static_cast<size_t>(d) * d, g.zeros());
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Field& out = s[static_cast<size_t>(i) * d + j];
      const Field& a = du[static_cast<size_t>(i) * d + j];
      const Field& b = du[static_cast<size_t>(j) * d + i];
      for (size_t p = 0; p < out.size(); ++p) out[p] = 0.5 * (a[p] + b[p]);
    }
  return s;
}

// Reduced driving forces s = N_E(q)* zeta. The zeta^w / E'_w quotient is
// formed pointwise, so zeta = DE collapses to (0,...,0,1) without roundoff
// in the quotient itself.
inline RFields ne_star(const ThermoModel&, const QFields& q, const ZFields& z,
                       const ThermoFields& t) {
  const Grid& g = q.grid;
  check_same_grid(g, z.grid);
  const int d = g.dim();
  const size_t n = g.num_points();
  for (size_t i = 0; i < n; ++i)
    if (!(std::abs(t.E_w[i]) > 0)) throw DegenerateEnergySlope("E'_w = 0 at a grid point");

  RFields s(g);
  std::vector<Field> Dz = sym_grad(g, z.zp);
  std::vector<Field> Dv = sym_grad(g, t.v);

  parallel_for(n, [&](size_t id) {
    const double ratio = z.zw[id] / t.E_w[id];
    for (int c = 0; c < d * d; ++c) s.sp[c][id] = Dz[c][id] - ratio * Dv[c][id];

    Tensor2 zfe(d), efe(d), fe(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        zfe(i, j) = z.zFe[static_cast<size_t>(i) * d + j][id];
        efe(i, j) = t.E_Fe[static_cast<size_t>(i) * d + j][id];
        fe(i, j) = q.Fe[static_cast<size_t>(i) * d + j][id];
      }
    double vdotz = 0;
    for (int i = 0; i < d; ++i) vdotz += t.v[i][id] * z.zp[i][id];
    Tensor2 sfe = matmul(transpose(fe), zfe) - ratio * matmul(transpose(fe), efe);
    for (int i = 0; i < d; ++i) sfe(i, i) -= 0.5 * t.rho[id] * vdotz;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) s.sFe[static_cast<size_t>(i) * d + j][id] = sfe(i, j);

    s.sa[id] = z.za[id] - ratio * t.E_a[id];
    s.sb[id] = z.zb[id] - ratio * t.E_b[id];
    s.sw[id] = z.zw[id] / t.E_w[id];
  });
  return s;
}

inline RFields ne_star(const ThermoModel& m, const QFields& q, const ZFields& z) {
  return ne_star(m, q, z, thermo_fields(m, q));
}

// Dual dissipation potential R*_simple(q, s) and its L2 gradient in s.
struct DissipationValue {
  double total = 0;
  double visc = 0, plast = 0, alpha = 0, beta = 0, heat = 0;
};

inline DissipationValue dual_dissipation_value(const OnsagerSpec& spec, const ThermoModel&,
                                               const QFields& q, const RFields& s,
                                               const ThermoFields& t) {
  const Grid& g = q.grid;
  const int d = g.dim();
  const size_t n = g.num_points();
  const DissipationSpec& ds = spec.diss;
  DissipationValue val;

  Field visc_density(n, 0.0), plast_density(n, 0.0), src_density(n, 0.0);
  parallel_for(n, [&](size_t id) {
    Tensor2 sp(d), sfe(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        sp(i, j) = s.sp[static_cast<size_t>(i) * d + j][id];
        sfe(i, j) = s.sFe[static_cast<size_t>(i) * d + j][id];
      }
    const double th = t.theta[id];
    visc_density[id] = 0.5 * th * ddot(sp, ds.visc_action(sp));
    const Tensor2 xi = (-th) * devsym(sfe);
    plast_density[id] = ds.rplast_value(xi, th);
    src_density[id] = 0.5 * ds.source_a * s.sa[id] * s.sa[id];
  });
  val.visc = g.integrate(visc_density);
  val.plast = g.integrate(plast_density);

  auto quad_grad_form = [&](const Field& f, double coef) {
    double acc = 0;
    for (int ax = 0; ax < d; ++ax) {
      Field df = g.deriv(f, ax);
      acc += 0.5 * coef * g.inner(df, df);
    }
    return acc;
  };
  val.alpha = quad_grad_form(s.sa, ds.diff_alpha) + g.integrate(src_density);
  val.beta = quad_grad_form(s.sb, ds.diff_beta);
  val.heat = quad_grad_form(s.sw, ds.heat_k);
  val.total = val.visc + val.plast + val.alpha + val.beta + val.heat;
  if (spec.hook && spec.hook->value) val.total += spec.hook->value(q, s, t);
  return val;
}

// L2 gradient of R*_simple at s
inline RFields dual_dissipation_grad(const OnsagerSpec& spec, const ThermoModel&,
                                     const QFields& q, const RFields& s,
                                     const ThermoFields& t) {
  const Grid& g = q.grid;
  const int d = g.dim();
  const size_t n = g.num_points();
  const DissipationSpec& ds = spec.diss;
  RFields gr(g);

  parallel_for(n, [&](size_t id) {
    Tensor2 sp(d), sfe(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        sp(i, j) = s.sp[static_cast<size_t>(i) * d + j][id];
        sfe(i, j) = s.sFe[static_cast<size_t>(i) * d + j][id];
      }
    const double th = t.theta[id];
    const Tensor2 gv = th * ds.visc_action(sp);
    const Tensor2 xi = (-th) * devsym(sfe);
    const Tensor2 gp = (-th) * devsym(ds.rplast_grad(xi, th));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        gr.sp[static_cast<size_t>(i) * d + j][id] = gv(i, j);
        gr.sFe[static_cast<size_t>(i) * d + j][id] = gp(i, j);
      }
    gr.sa[id] = ds.source_a * s.sa[id];
  });
  // -div(K grad s) pieces
  auto add_neg_div_k_grad = [&](const Field& f, double coef, Field& out) {
    for (int ax = 0; ax < d; ++ax) {
      Field df = g.deriv(f, ax);
      for (auto& v : df) v *= coef;
      Field dd = g.deriv(df, ax);
      for (size_t i = 0; i < n; ++i) out[i] -= dd[i];
    }
  };
  add_neg_div_k_grad(s.sa, ds.diff_alpha, gr.sa);
  add_neg_div_k_grad(s.sb, ds.diff_beta, gr.sb);
  add_neg_div_k_grad(s.sw, ds.heat_k, gr.sw);
  if (spec.hook && spec.hook->grad) {
    RFields hg = spec.hook->grad(q, s, t);
    for (int c = 0; c < d * d; ++c)
      for (size_t i = 0; i < n; ++i) {
        gr.sp[c][i] += hg.sp[c][i];
        gr.sFe[c][i] += hg.sFe[c][i];
      }
    for (size_t i = 0; i < n; ++i) {
      gr.sa[i] += hg.sa[i];
      gr.sb[i] += hg.sb[i];
      gr.sw[i] += hg.sw[i];
    }
  }
  return gr;
}

// N_E(q) applied to an s-space gradient bundle: the adjoint of the reduced
// driving-force map. Composing ne_star -> dual_dissipation_grad -> apply_ne
// is the generic assembly of the irreversible field; the specialized v_irr
// below evaluates the same thing from the closed-form blocks.
inline QFields apply_ne(const ThermoModel&, const QFields& q, const ThermoFields& t,
                        const RFields& gr) {
  const Grid& g = q.grid;
  const int d = g.dim();
  const size_t n = g.num_points();
  QFields out(g);

  // momentum: -div(g^p) - (rho/2) tr(g^Fe) v
  for (int i = 0; i < d; ++i) {
    Field row = g.zeros();
    for (int j = 0; j < d; ++j) {
      Field dd = g.deriv(gr.sp[static_cast<size_t>(i) * d + j], j);
      for (size_t p = 0; p < n; ++p) row[p] -= dd[p];
    }
    for (size_t p = 0; p < n; ++p) {
      double tr = 0;
      for (int k = 0; k < d; ++k) tr += gr.sFe[static_cast<size_t>(k) * d + k][p];
      row[p] -= 0.5 * t.rho[p] * tr * t.v[i][p];
    }
    out.p[i] = std::move(row);
  }

  std::vector<Field> Dv = sym_grad(g, t.v);
  parallel_for(n, [&](size_t id) {
    Tensor2 gfe(d), gsp(d), fe(d), efe(d), Dl(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const size_t c = static_cast<size_t>(i) * d + j;
        gfe(i, j) = gr.sFe[c][id];
        gsp(i, j) = gr.sp[c][id];
        fe(i, j) = q.Fe[c][id];
        efe(i, j) = t.E_Fe[c][id];
        Dl(i, j) = Dv[c][id];
      }
    const Tensor2 fegfe = matmul(fe, gfe);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) out.Fe[static_cast<size_t>(i) * d + j][id] = fegfe(i, j);
    out.alpha[id] = gr.sa[id];
    out.beta[id] = gr.sb[id];
    const double wrow = -ddot(Dl, gsp) - ddot(matmul(transpose(fe), efe), gfe) -
                        t.E_a[id] * gr.sa[id] - t.E_b[id] * gr.sb[id] + gr.sw[id];
    out.w[id] = wrow / t.E_w[id];
  });
  return out;
}

// generic-route irreversible field: N_E dR*(q, N_E* DS)
inline QFields v_irr_generic(const ThermoModel& m, const OnsagerSpec& spec, const QFields& q,
                             const ThermoFields& t) {
  ZFields ds = ds_fields(m, q, t);
  RFields s = ne_star(m, q, ds, t);
  RFields gr = dual_dissipation_grad(spec, m, q, s, t);
  return apply_ne(m, q, t, gr);
}

// L_p = theta M* dR*_plast(q, M Sigma_Mandel), pointwise
inline Tensor2 lp_local(const DissipationSpec& ds, const Tensor2& mandel, double theta) {
  const Tensor2 xi = devsym(mandel);
  return theta * ds.rplast_grad(xi, theta);
}

// Dissipative (irreversible) part of the evolution.
inline QFields v_irr(const ThermoModel&, const OnsagerSpec& spec, const QFields& q,
                     const ThermoFields& t) {
  const Grid& g = q.grid;
  const int d = g.dim();
  const size_t n = g.num_points();
  const DissipationSpec& ds = spec.diss;
  QFields out(g);

  std::vector<Field> D = sym_grad(g, t.v);

  // pointwise: viscous stress, L_p, chemical potentials over temperature
  std::vector<Field> svisc(static_cast<size_t>(d) * d, g.zeros());
  std::vector<Field> lp(static_cast<size_t>(d) * d, g.zeros());
  Field mua_th(n), mub_th(n), inv_th(n), trlp(n), ddvisc(n), efe_felp(n);
  parallel_for(n, [&](size_t id) {
    Tensor2 Dl(d), efe(d), sfeT(d), fe(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        Dl(i, j) = D[static_cast<size_t>(i) * d + j][id];
        efe(i, j) = t.E_Fe[static_cast<size_t>(i) * d + j][id];
        sfeT(i, j) = t.S_Fe[static_cast<size_t>(i) * d + j][id];
        fe(i, j) = q.Fe[static_cast<size_t>(i) * d + j][id];
      }
    const double th = t.theta[id];
    const Tensor2 sv = ds.visc_action(Dl);
    const Tensor2 mandel = matmul(transpose(fe), efe - th * sfeT);
    const Tensor2 lpl = lp_local(ds, mandel, th);
    const Tensor2 felp = matmul(fe, lpl);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        svisc[static_cast<size_t>(i) * d + j][id] = sv(i, j);
        lp[static_cast<size_t>(i) * d + j][id] = felp(i, j);
      }
    trlp[id] = trace(lpl);
    ddvisc[id] = ddot(Dl, sv);
    efe_felp[id] = ddot(efe, felp);
    const double mua = t.E_a[id] - th * t.S_a[id];
    const double mub = t.E_b[id] - th * t.S_b[id];
    mua_th[id] = mua / th;
    mub_th[id] = mub / th;
    inv_th[id] = 1.0 / th;
  });

  // momentum row: div(D_visc D) + (rho/2) tr(L_p) v
  for (int i = 0; i < d; ++i) {
    Field row = g.zeros();
    for (int j = 0; j < d; ++j) {
      Field dm = g.deriv(svisc[static_cast<size_t>(i) * d + j], j);
      for (size_t p = 0; p < n; ++p) row[p] += dm[p];
    }
    for (size_t p = 0; p < n; ++p) row[p] += 0.5 * t.rho[p] * trlp[p] * t.v[i][p];
    out.p[i] = std::move(row);
  }

  // F_e row: -Fe L_p
  for (int c = 0; c < d * d; ++c)
    for (size_t p = 0; p < n; ++p) out.Fe[c][p] = -lp[c][p];

  // scalar diffusion rows
  auto diffusion = [&](const Field& pot, double coef, Field& dst) {
    for (int ax = 0; ax < d; ++ax) {
      Field df = g.deriv(pot, ax);
      for (auto& v : df) v *= coef;
      Field dd = g.deriv(df, ax);
      for (size_t i = 0; i < n; ++i) dst[i] += dd[i];
    }
  };
  diffusion(mua_th, ds.diff_alpha, out.alpha);
  for (size_t i = 0; i < n; ++i) out.alpha[i] -= ds.source_a * mua_th[i];
  diffusion(mub_th, ds.diff_beta, out.beta);

  // w row
  Field heatdiv = g.zeros();
  diffusion(inv_th, ds.heat_k, heatdiv);  // div(K_heat grad(1/Theta))
  for (size_t i = 0; i < n; ++i) {
    double acc = ddvisc[i] + efe_felp[i] - t.E_a[i] * out.alpha[i] - t.E_b[i] * out.beta[i] -
                 heatdiv[i];
    out.w[i] = acc / t.E_w[i];
  }
  return out;
}

inline QFields v_irr(const ThermoModel& m, const OnsagerSpec& spec, const QFields& q) {
  return v_irr(m, spec, q, thermo_fields(m, q));
}

// Pointwise entropy production rate (diagnostics; every term nonnegative):
//   sigma = (1/Th) D : D_visc D + xi : dR*(xi) + grad(mu^a/Th).A.grad(mu^a/Th)
//           + A_src (mu^a/Th)^2 + grad(mu^b/Th).B.grad(mu^b/Th)
//           + grad(1/Th).K.grad(1/Th)
inline Field entropy_production(const ThermoModel&, const OnsagerSpec& spec, const QFields& q,
                                const ThermoFields& t) {
  const Grid& g = q.grid;
  const int d = g.dim();
  const size_t n = g.num_points();
  const DissipationSpec& ds = spec.diss;
  Field mua_th(n), mub_th(n), inv_th(n);
  Field sig(n, 0.0);

  std::vector<Field> D = sym_grad(g, t.v);
  parallel_for(n, [&](size_t id) {
    Tensor2 Dl(d), efe(d), sfeT(d), fe(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        Dl(i, j) = D[static_cast<size_t>(i) * d + j][id];
        efe(i, j) = t.E_Fe[static_cast<size_t>(i) * d + j][id];
        sfeT(i, j) = t.S_Fe[static_cast<size_t>(i) * d + j][id];
        fe(i, j) = q.Fe[static_cast<size_t>(i) * d + j][id];
      }
    const double th = t.theta[id];
    const Tensor2 mandel = matmul(transpose(fe), efe - th * sfeT);
    const Tensor2 xi = devsym(mandel);
    sig[id] = ddot(Dl, ds.visc_action(Dl)) / th + ddot(xi, ds.rplast_grad(xi, th));
    const double mua = (t.E_a[id] - th * t.S_a[id]) / th;
    const double mub = (t.E_b[id] - th * t.S_b[id]) / th;
    mua_th[id] = mua;
    mub_th[id] = mub;
    inv_th[id] = 1.0 / th;
    sig[id] += ds.source_a * mua * mua;
  });
  auto add_grad_quad = [&](const Field& f, double coef) {
    for (int ax = 0; ax < d; ++ax) {
      Field df = g.deriv(f, ax);
      for (size_t i = 0; i < n; ++i) sig[i] += coef * df[i] * df[i];
    }
  };
  add_grad_quad(mua_th, ds.diff_alpha);
  add_grad_quad(mub_th, ds.diff_beta);
  add_grad_quad(inv_th, ds.heat_k);
  return sig;
}

}  // namespace eutherm
