#pragma once

#include <memory>
#include <vector>

#include "eutherm/grid.hpp"
#include "eutherm/tensor.hpp"

namespace eutherm {

// Pointwise state q = (p, F_e, alpha, beta, w): momentum density, elastic
// distortion, intensive scalar, extensive scalar, thermal variable.
struct StateLocal {
  Vec p;
  Tensor2 Fe;
  double alpha = 0;
  double beta = 0;
  double w = 0;
};

// Covector dual to StateLocal.
struct CotangentLocal {
  Vec zp;
  Tensor2 zFe;
  double za = 0;
  double zb = 0;
  double zw = 0;
};

// Reduced driving forces s = N_E(q)* zeta.
struct ReducedLocal {
  Tensor2 sp;   // symmetric
  Tensor2 sFe;
  double sa = 0;
  double sb = 0;
  double sw = 0;
};

// Structure-of-arrays layout for grids of StateLocal. Also reused for tangent
// increments (then `w` holds dw etc.).
struct QFields {
  QFields() = default;
  explicit QFields(const Grid& g)
      : grid(g),
        p(g.dim(), g.zeros()),
        Fe(static_cast<size_t>(g.dim()) * g.dim(), g.zeros()),
        alpha(g.zeros()),
        beta(g.zeros()),
        w(g.zeros()) {}

  Grid grid;
  std::vector<Field> p;    // d components
  std::vector<Field> Fe;   // d*d components, row-major i*d+j
  Field alpha, beta, w;

  int dim() const { return grid.dim(); }

  StateLocal at(size_t id) const {
    const int d = dim();
    StateLocal q;
    q.p = Vec(d);
    q.Fe = Tensor2(d);
    for (int i = 0; i < d; ++i) q.p[i] = p[i][id];
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) q.Fe(i, j) = Fe[static_cast<size_t>(i) * d + j][id];
    q.alpha = alpha[id];
    q.beta = beta[id];
    q.w = w[id];
    return q;
  }

  void set(size_t id, const StateLocal& q) {
    const int d = dim();
    for (int i = 0; i < d; ++i) p[i][id] = q.p[i];
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) Fe[static_cast<size_t>(i) * d + j][id] = q.Fe(i, j);
    alpha[id] = q.alpha;
    beta[id] = q.beta;
    w[id] = q.w;
  }

  std::vector<Field*> components() {
    std::vector<Field*> c;
    for (auto& f : p) c.push_back(&f);
    for (auto& f : Fe) c.push_back(&f);
    c.push_back(&alpha);
    c.push_back(&beta);
    c.push_back(&w);
    return c;
  }
  std::vector<const Field*> components() const {
    std::vector<const Field*> c;
    for (auto& f : p) c.push_back(&f);
    for (auto& f : Fe) c.push_back(&f);
    c.push_back(&alpha);
    c.push_back(&beta);
    c.push_back(&w);
    return c;
  }
};

struct ZFields {
  ZFields() = default;
  explicit ZFields(const Grid& g)
      : grid(g),
        zp(g.dim(), g.zeros()),
        zFe(static_cast<size_t>(g.dim()) * g.dim(), g.zeros()),
        za(g.zeros()),
        zb(g.zeros()),
        zw(g.zeros()) {}

  Grid grid;
  std::vector<Field> zp;
  std::vector<Field> zFe;
  Field za, zb, zw;

  int dim() const { return grid.dim(); }

  CotangentLocal at(size_t id) const {
    const int d = dim();
    CotangentLocal z;
    z.zp = Vec(d);
    z.zFe = Tensor2(d);
    for (int i = 0; i < d; ++i) z.zp[i] = zp[i][id];
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) z.zFe(i, j) = zFe[static_cast<size_t>(i) * d + j][id];
    z.za = za[id];
    z.zb = zb[id];
    z.zw = zw[id];
    return z;
  }

  void set(size_t id, const CotangentLocal& z) {
    const int d = dim();
    for (int i = 0; i < d; ++i) zp[i][id] = z.zp[i];
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) zFe[static_cast<size_t>(i) * d + j][id] = z.zFe(i, j);
    za[id] = z.za;
    zb[id] = z.zb;
    zw[id] = z.zw;
  }

  std::vector<const Field*> components() const {
    std::vector<const Field*> c;
    for (auto& f : zp) c.push_back(&f);
    for (auto& f : zFe) c.push_back(&f);
    c.push_back(&za);
    c.push_back(&zb);
    c.push_back(&zw);
    return c;
  }
};

struct RFields {
  RFields() = default;
  explicit RFields(const Grid& g)
      : grid(g),
        sp(static_cast<size_t>(g.dim()) * g.dim(), g.zeros()),
        sFe(static_cast<size_t>(g.dim()) * g.dim(), g.zeros()),
        sa(g.zeros()),
        sb(g.zeros()),
        sw(g.zeros()) {}

  Grid grid;
  std::vector<Field> sp;   // symmetric d*d
  std::vector<Field> sFe;
  Field sa, sb, sw;

  int dim() const { return grid.dim(); }
};

inline void check_same_grid(const Grid& a, const Grid& b) {
  if (!a.compatible(b)) throw GridMismatch("fields live on different grids");
}

// L2 pairing of a cotangent with a tangent field (the duality the Poisson
// certificates are phrased in).
inline double pair_fields(const ZFields& z, const QFields& dq) {
  check_same_grid(z.grid, dq.grid);
  auto zc = z.components();
  auto qc = dq.components();
  double s = 0;
  for (size_t k = 0; k < zc.size(); ++k) s += z.grid.inner(*zc[k], *qc[k]);
  return s;
}

inline double field_norm(const ZFields& z) {
  double s = 0;
  for (auto* f : z.components()) s += z.grid.inner(*f, *f);
  return std::sqrt(s);
}

inline double field_norm(const QFields& q) {
  double s = 0;
  for (auto* f : q.components()) s += q.grid.inner(*f, *f);
  return std::sqrt(s);
}

inline QFields& axpy(QFields& y, double c, const QFields& x) {
  auto yc = y.components();
  auto xc = x.components();
  for (size_t k = 0; k < yc.size(); ++k) {
    Field& a = *yc[k];
    const Field& b = *xc[k];
    for (size_t i = 0; i < a.size(); ++i) a[i] += c * b[i];
  }
  return y;
}

inline QFields combo(const QFields& q0, double c, const QFields& k) {
  QFields r = q0;
  axpy(r, c, k);
  return r;
}

}  // namespace eutherm
