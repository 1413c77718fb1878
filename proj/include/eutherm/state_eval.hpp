#pragma once

#include <vector>

#include "eutherm/fields.hpp"
#include "eutherm/thermo.hpp"
#include "eutherm/threading.hpp"

namespace eutherm {

// Pointwise constitutive evaluation over a whole state field, laid out as
// structure-of-arrays so the operator layer can mix pointwise algebra with
// spectral derivatives.
struct ThermoFields {
  Grid grid;
  Field theta, E, S;
  std::vector<Field> E_Fe, S_Fe;   // d*d
  Field E_a, E_b, E_w, S_a, S_b, S_w;
  Field rho;                       // rho_R / det Fe
  std::vector<Field> v;            // p / rho
};

inline ThermoFields thermo_fields(const ThermoModel& m, const QFields& q) {
  const Grid& g = q.grid;
  const int d = g.dim();
  ThermoFields t;
  t.grid = g;
  t.theta = g.zeros();
  t.E = g.zeros();
  t.S = g.zeros();
  t.E_Fe.assign(static_cast<size_t>(d) * d, g.zeros());
  t.S_Fe.assign(static_cast<size_t>(d) * d, g.zeros());
  t.E_a = g.zeros();
  t.E_b = g.zeros();
  t.E_w = g.zeros();
  t.S_a = g.zeros();
  t.S_b = g.zeros();
  t.S_w = g.zeros();
  t.rho = g.zeros();
  t.v.assign(static_cast<size_t>(d), g.zeros());
  const double rho_r = m.rho_ref();
  parallel_for(g.num_points(), [&](size_t id) {
    const StateLocal ql = q.at(id);
    const ThermoEval te = m.eval(ql);
    t.theta[id] = te.theta;
    t.E[id] = te.E;
    t.S[id] = te.S;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        t.E_Fe[static_cast<size_t>(i) * d + j][id] = te.E_Fe(i, j);
        t.S_Fe[static_cast<size_t>(i) * d + j][id] = te.S_Fe(i, j);
      }
    t.E_a[id] = te.E_a;
    t.E_b[id] = te.E_b;
    t.E_w[id] = te.E_w;
    t.S_a[id] = te.S_a;
    t.S_b[id] = te.S_b;
    t.S_w[id] = te.S_w;
    const double J = det(ql.Fe);
    if (!(J > 0)) throw Inadmissible("det Fe <= 0 at grid point");
    t.rho[id] = rho_r / J;
    for (int i = 0; i < d; ++i) t.v[i][id] = ql.p[i] / t.rho[id];
  });
  return t;
}

// DE(q) = (v, E'_Fe + (rho |v|^2 / 2) Fe^{-T}, E'_a, E'_b, E'_w)
inline ZFields de_fields(const ThermoModel&, const QFields& q, const ThermoFields& t) {
  const Grid& g = q.grid;
  const int d = g.dim();
  ZFields z(g);
  parallel_for(g.num_points(), [&](size_t id) {
    const StateLocal ql = q.at(id);
    double v2 = 0;
    for (int i = 0; i < d; ++i) {
      z.zp[i][id] = t.v[i][id];
      v2 += t.v[i][id] * t.v[i][id];
    }
    const Tensor2 feInvT = transpose(inv(ql.Fe));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        z.zFe[static_cast<size_t>(i) * d + j][id] =
            t.E_Fe[static_cast<size_t>(i) * d + j][id] + 0.5 * t.rho[id] * v2 * feInvT(i, j);
    z.za[id] = t.E_a[id];
    z.zb[id] = t.E_b[id];
    z.zw[id] = t.E_w[id];
  });
  return z;
}

// DS(q) = (0, S'_Fe, S'_a, S'_b, S'_w)
inline ZFields ds_fields(const ThermoModel&, const QFields& q, const ThermoFields& t) {
  const Grid& g = q.grid;
  const int d = g.dim();
  ZFields z(g);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) z.zFe[static_cast<size_t>(i) * d + j] = t.S_Fe[static_cast<size_t>(i) * d + j];
  z.za = t.S_a;
  z.zb = t.S_b;
  z.zw = t.S_w;
  return z;
}

}  // namespace eutherm
