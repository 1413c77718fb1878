#include <catch2/catch_amalgamated.hpp>

#include "eutherm/onsager.hpp"
#include "eutherm/verify.hpp"
#include "test_util.hpp"

using namespace eutherm;

namespace {

OnsagerSpec full_spec() {
  OnsagerSpec s;
  s.diss.visc_shear = 0.4;
  s.diss.visc_bulk = 0.3;
  s.diss.diff_alpha = 0.2;
  s.diss.diff_beta = 0.15;
  s.diss.heat_k = 0.5;
  s.diss.source_a = 0.1;
  s.diss.plast = DissipationSpec::Plast::Quadratic;
  s.diss.plast_eta = 2.0;
  return s;
}

}  // namespace

TEST_CASE("reduced forces at DE and DS", "[onsager]") {
  ThermoModel m = quadratic_test_model();
  Grid g(2, 32, 1.0);
  QFields q = random_state(m, g, 4, 13, 0.4);
  ThermoFields t = thermo_fields(m, q);

  // N_E* DE = (0, ..., 0, 1)
  ZFields de = de_fields(m, q, t);
  RFields sde = ne_star(m, q, de, t);
  double worst = 0;
  for (const auto& f : sde.sp)
    for (double v : f) worst = std::max(worst, std::abs(v));
  for (double v : sde.sa) worst = std::max(worst, std::abs(v));
  for (double v : sde.sb) worst = std::max(worst, std::abs(v));
  CHECK(worst == 0.0);  // exact cancellations in the quotient form
  double worst_fe = 0, fe_scale = 1e-300;
  for (const auto& f : sde.sFe)
    for (double v : f) worst_fe = std::max(worst_fe, std::abs(v));
  for (size_t i = 0; i < g.num_points(); ++i)
    fe_scale = std::max(fe_scale, std::abs(t.E_Fe[0][i]));
  CHECK(worst_fe <= 1e-12 * fe_scale);
  for (double v : sde.sw) CHECK(v == 1.0);

  // N_E* DS = (-(1/Th) D, -(1/Th) Mandel, -mu_a/Th, -mu_b/Th, 1/Th)
  ZFields ds = ds_fields(m, q, t);
  RFields sds = ne_star(m, q, ds, t);
  std::vector<Field> Dv = sym_grad(g, t.v);
  double res = 0, scale = 1e-300;
  for (size_t i = 0; i < g.num_points(); ++i) {
    const StateLocal ql = q.at(i);
    const double th = t.theta[i];
    Tensor2 efe(2), sfe(2);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        efe(a, b) = t.E_Fe[static_cast<size_t>(a) * 2 + b][i];
        sfe(a, b) = t.S_Fe[static_cast<size_t>(a) * 2 + b][i];
      }
    const Tensor2 mandel = matmul(transpose(ql.Fe), efe - th * sfe);
    for (int c = 0; c < 4; ++c) {
      res = std::max(res, std::abs(sds.sp[c][i] + Dv[c][i] / th));
      const int a = c / 2, b = c % 2;
      res = std::max(res, std::abs(sds.sFe[c][i] + mandel(a, b) / th));
      scale = std::max({scale, std::abs(Dv[c][i] / th), std::abs(mandel(a, b) / th)});
    }
    const double mua = t.E_a[i] - th * t.S_a[i];
    const double mub = t.E_b[i] - th * t.S_b[i];
    res = std::max(res, std::abs(sds.sa[i] + mua / th));
    res = std::max(res, std::abs(sds.sb[i] + mub / th));
    res = std::max(res, std::abs(sds.sw[i] - 1.0 / th));
    scale = std::max({scale, std::abs(mua / th), 1.0 / th});
  }
  CHECK(res / scale <= 1e-10);

  // zero cotangent maps to zero forces
  ZFields z0(g);
  RFields s0 = ne_star(m, q, z0, t);
  for (const auto& f : s0.sp)
    for (double v : f) CHECK(v == 0.0);
  for (double v : s0.sw) CHECK(v == 0.0);
}

TEST_CASE("dual dissipation potential values and gradient", "[onsager]") {
  ThermoModel m = quadratic_test_model();
  OnsagerSpec spec = full_spec();
  Grid g(1, 64, 1.0);
  QFields q = random_state(m, g, 4, 17, 0.4);
  ThermoFields t = thermo_fields(m, q);

  // zero forces: zero value, zero gradient
  RFields s0(g);
  CHECK(dual_dissipation_value(spec, m, q, s0, t).total == 0.0);
  RFields g0 = dual_dissipation_grad(spec, m, q, s0, t);
  for (const auto& f : g0.sp)
    for (double v : f) CHECK(v == 0.0);

  // constant sw: the heat block sees only gradients
  RFields sc(g);
  sc.sw.assign(g.num_points(), 3.7);
  CHECK(dual_dissipation_value(spec, m, q, sc, t).total <= 1e-18);

  // quadratic blocks against a hand evaluation on a tiny grid
  {
    Grid g2(1, 8, 2.0);
    QFields q2 = random_state(m, g2, 2, 19, 0.3);
    ThermoFields t2 = thermo_fields(m, q2);
    RFields s(g2);
    s.sa = scaled_smooth(g2, 2, 5, 1.0);
    OnsagerSpec sa;
    sa.diss.diff_alpha = 0.7;
    sa.diss.source_a = 0.2;
    const DissipationValue val = dual_dissipation_value(sa, m, q2, s, t2);
    Field dsa = g2.deriv(s.sa, 0);
    double expect = 0;
    for (size_t i = 0; i < g2.num_points(); ++i)
      expect += 0.5 * 0.7 * dsa[i] * dsa[i] + 0.5 * 0.2 * s.sa[i] * s.sa[i];
    expect *= g2.cell_volume();
    CHECK(val.total == Catch::Approx(expect).epsilon(1e-12));
  }

  // gradient consistent with directional finite differences
  RFields s(g);
  s.sa = scaled_smooth(g, 3, 23, 0.5);
  s.sb = scaled_smooth(g, 3, 29, 0.5);
  s.sw = scaled_smooth(g, 3, 31, 0.5);
  for (int c = 0; c < 1; ++c) {
    s.sp[c] = scaled_smooth(g, 3, 37 + c, 0.5);
    s.sFe[c] = scaled_smooth(g, 3, 41 + c, 0.5);
  }
  RFields dir(g);
  dir.sa = scaled_smooth(g, 3, 43, 1.0);
  dir.sb = scaled_smooth(g, 3, 47, 1.0);
  dir.sw = scaled_smooth(g, 3, 53, 1.0);
  dir.sp[0] = scaled_smooth(g, 3, 59, 1.0);
  dir.sFe[0] = scaled_smooth(g, 3, 61, 1.0);

  auto shift = [&](double h) {
    RFields r = s;
    auto add = [&](Field& dst, const Field& u) {
      for (size_t i = 0; i < dst.size(); ++i) dst[i] += h * u[i];
    };
    add(r.sa, dir.sa);
    add(r.sb, dir.sb);
    add(r.sw, dir.sw);
    add(r.sp[0], dir.sp[0]);
    add(r.sFe[0], dir.sFe[0]);
    return r;
  };
  const double h = 1e-6;
  const double fp = dual_dissipation_value(spec, m, q, shift(h), t).total;
  const double fm = dual_dissipation_value(spec, m, q, shift(-h), t).total;
  const double fd = (fp - fm) / (2 * h);
  RFields grad = dual_dissipation_grad(spec, m, q, s, t);
  double an = 0;
  an += g.inner(grad.sa, dir.sa) + g.inner(grad.sb, dir.sb) + g.inner(grad.sw, dir.sw);
  an += g.inner(grad.sp[0], dir.sp[0]) + g.inner(grad.sFe[0], dir.sFe[0]);
  CHECK(std::abs(fd - an) <= 1e-6 * (std::abs(fd) + std::abs(an) + 1e-12));
}

TEST_CASE("irreversible field: zero coefficients give zero", "[onsager]") {
  ThermoModel m = quadratic_test_model();
  OnsagerSpec none;
  Grid g(1, 64, 1.0);
  QFields q = random_state(m, g, 4, 51, 0.4);
  QFields out = v_irr(m, none, q);
  for (const Field* f : out.components())
    for (double v : *f) CHECK(v == 0.0);
}

TEST_CASE("irreversible field: entropy production and energy neutrality", "[onsager]") {
  for (int d : {1, 2}) {
    ThermoModel m = quadratic_test_model();
    OnsagerSpec spec = full_spec();
    Grid g(d, d == 1 ? 64 : 32, 1.0);
    QFields q = random_state(m, g, 3, 53 + d, 0.4);
    ThermoFields t = thermo_fields(m, q);
    QFields vi = v_irr(m, spec, q, t);

    ZFields ds = ds_fields(m, q, t);
    ZFields de = de_fields(m, q, t);
    const double dS = pair_fields(ds, vi);
    const double dE = pair_fields(de, vi);
    const double scale = field_norm(de) * field_norm(vi) + 1e-300;
    CHECK(dS >= -1e-10 * (std::abs(dS) + scale));
    CHECK(dS > 0.0);  // forces are generic, so strictly positive
    CHECK(std::abs(dE) / scale <= 1e-9);
  }
}

TEST_CASE("plastic flow is deviatoric and heats the thermal row", "[onsager]") {
  ThermoModel m = quadratic_test_model();
  OnsagerSpec spec;
  spec.diss.plast = DissipationSpec::Plast::Quadratic;
  spec.diss.plast_eta = 1.0;
  Grid g(2, 32, 1.0);
  QFields q = random_state(m, g, 3, 67, 0.5);
  ThermoFields t = thermo_fields(m, q);

  for (size_t i = 0; i < g.num_points(); ++i) {
    const StateLocal ql = q.at(i);
    Tensor2 efe(2), sfe(2);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        efe(a, b) = t.E_Fe[static_cast<size_t>(a) * 2 + b][i];
        sfe(a, b) = t.S_Fe[static_cast<size_t>(a) * 2 + b][i];
      }
    const Tensor2 mandel = matmul(transpose(ql.Fe), efe - t.theta[i] * sfe);
    const Tensor2 lp = lp_local(spec.diss, mandel, t.theta[i]);
    CHECK(std::abs(trace(lp)) <= 1e-12 * (frob(lp) + 1e-300));
  }

  // the assembled momentum correction (rho/2) tr(Lp) v is zero by the
  // deviatoric restriction; with viscosity off the momentum row is exactly it
  QFields vi = v_irr(m, spec, q, t);
  double vscale = 0;
  for (const auto& f : t.v)
    for (double v : f) vscale = std::max(vscale, std::abs(v));
  double fe_scale = 0;
  for (const auto& f : vi.Fe)
    for (double v : f) fe_scale = std::max(fe_scale, std::abs(v));
  for (int c = 0; c < 2; ++c)
    for (double v : vi.p[c]) CHECK(std::abs(v) <= 1e-12 * vscale * fe_scale + 1e-300);
}

TEST_CASE("pointwise entropy production is nonnegative", "[onsager]") {
  ThermoModel m = quadratic_test_model();
  OnsagerSpec spec = full_spec();
  Grid g(2, 32, 1.0);
  QFields q = random_state(m, g, 4, 71, 0.5);
  ThermoFields t = thermo_fields(m, q);
  Field sig = entropy_production(m, spec, q, t);
  for (double v : sig) CHECK(v >= 0.0);
}

TEST_CASE("gauge consistency of the irreversible field", "[onsager]") {
  ThermoModel mt = quadratic_test_model();
  ThermoModel me = mt.with_gauge(ThermalGauge::InternalEnergy);
  OnsagerSpec spec = full_spec();
  Grid g(1, 64, 1.0);
  QFields qt = random_state(mt, g, 4, 73, 0.4);
  QFields qe = qt;
  parallel_for(g.num_points(), [&](size_t i) {
    StateLocal ql = qt.at(i);
    qe.w[i] = mt.triple(ql).e;
  });
  ThermoFields tt = thermo_fields(mt, qt);
  QFields vt = v_irr(mt, spec, qt, tt);
  QFields ve = v_irr(me, spec, qe, thermo_fields(me, qe));

  double scale = 1e-300;
  for (const Field* f : ve.components())
    for (double v : *f) scale = std::max(scale, std::abs(v));
  auto ct = vt.components();
  auto ce = ve.components();
  for (size_t c = 0; c + 1 < ct.size(); ++c)
    for (size_t i = 0; i < ct[c]->size(); ++i)
      CHECK(std::abs((*ct[c])[i] - (*ce[c])[i]) <= 1e-8 * scale);
  for (size_t i = 0; i < g.num_points(); ++i) {
    double de = tt.E_w[i] * vt.w[i] + tt.E_a[i] * vt.alpha[i] + tt.E_b[i] * vt.beta[i];
    for (int c = 0; c < 1; ++c) de += tt.E_Fe[c][i] * vt.Fe[c][i];
    CHECK(std::abs(de - ve.w[i]) <= 1e-8 * scale);
  }
}

TEST_CASE("degenerate energy slope is rejected", "[onsager]") {
  // a model with E'_w = 0 cannot define reduced forces; simplest trigger is
  // a crafted cotangent pass on a state evaluated in a gauge where E_w comes
  // from the model, with the model made pathological
  class FlatECore final : public ThermoCore {
   public:
    std::string name() const override { return "flat"; }
    ThetaPack eval(const Tensor2& Fe, double, double, double th) const override {
      ThetaPack pk;
      pk.psi_Fe = Tensor2(Fe.dim());
      pk.psi_Fe_th = Tensor2(Fe.dim());
      pk.psi = -th;      // E = psi - th psi_th = -th + th = 0: E'_w = 0
      pk.psi_th = -1.0;  // S = 1
      pk.psi_th_th = 0.0;
      return pk;
    }
    AdmissibleBox box() const override { return {}; }
    double rho_ref() const override { return 1.0; }
  };
  ThermoModel bad(std::make_shared<FlatECore>(), ThermalGauge::Temperature);
  Grid g(1, 64, 1.0);
  QFields q(g);
  q.Fe[0].assign(g.num_points(), 1.0);
  q.w.assign(g.num_points(), 1.0);
  ZFields z = random_cotangent(g, 3, 5);
  CHECK_THROWS_AS(ne_star(bad, q, z), DegenerateEnergySlope);
}

TEST_CASE("generic and block routes assemble the same irreversible field", "[onsager]") {
  ThermoModel m = quadratic_test_model();
  OnsagerSpec spec = full_spec();
  for (int d : {1, 2}) {
    Grid g(d, d == 1 ? 64 : 32, 1.0);
    QFields q = random_state(m, g, 3, 83 + d, 0.4);
    ThermoFields t = thermo_fields(m, q);
    QFields block = v_irr(m, spec, q, t);
    QFields generic = v_irr_generic(m, spec, q, t);
    double scale = 1e-300;
    for (const Field* f : block.components())
      for (double v : *f) scale = std::max(scale, std::abs(v));
    auto bc = block.components();
    auto gc = generic.components();
    for (size_t c = 0; c < bc.size(); ++c)
      for (size_t i = 0; i < bc[c]->size(); ++i)
        CHECK(std::abs((*bc[c])[i] - (*gc[c])[i]) <= 1e-10 * scale);
  }
}

TEST_CASE("cross-coupled hook is caught by the NIC2 certificate", "[onsager]") {
  ThermoModel m = quadratic_test_model();
  Grid g(1, 64, 1.0);
  QFields q = random_state(m, g, 4, 97, 0.4);

  // a thermal-slot quadratic: dissipates under constant 1/theta shifts,
  // which is exactly what the second non-interaction condition forbids
  auto hook = std::make_shared<RStarHook>();
  hook->value = [](const QFields& qq, const RFields& s, const ThermoFields&) {
    Field dens(qq.grid.num_points());
    for (size_t i = 0; i < dens.size(); ++i) dens[i] = 0.5 * s.sw[i] * s.sw[i];
    return qq.grid.integrate(dens);
  };
  hook->grad = [](const QFields& qq, const RFields& s, const ThermoFields&) {
    RFields gr(qq.grid);
    gr.sw = s.sw;
    return gr;
  };

  OnsagerSpec good = full_spec();
  OnsagerSpec bad = full_spec();
  bad.hook = hook;

  Nic2Result ok = nic2_residual(m, good, q);
  Nic2Result flagged = nic2_residual(m, bad, q);
  CHECK(ok.rstar_max <= 1e-18);
  CHECK(flagged.rstar_max > 1e-3);

  // a benign hook that ignores s^w passes the certificate
  auto benign = std::make_shared<RStarHook>();
  benign->value = [](const QFields& qq, const RFields& s, const ThermoFields&) {
    Field dens(qq.grid.num_points());
    for (size_t i = 0; i < dens.size(); ++i) dens[i] = 0.25 * s.sa[i] * s.sa[i];
    return qq.grid.integrate(dens);
  };
  benign->grad = [](const QFields& qq, const RFields& s, const ThermoFields&) {
    RFields gr(qq.grid);
    for (size_t i = 0; i < gr.sa.size(); ++i) gr.sa[i] = 0.5 * s.sa[i];
    return gr;
  };
  OnsagerSpec crossed = full_spec();
  crossed.hook = benign;
  Nic2Result pass2 = nic2_residual(m, crossed, q);
  CHECK(pass2.rstar_max <= 1e-18);
}
