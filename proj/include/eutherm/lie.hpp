#pragma once

#include <vector>

#include "eutherm/fields.hpp"
#include "eutherm/grid.hpp"

namespace eutherm {

// Spectral differential operators on fields.

inline std::vector<Field> grad(const Grid& g, const Field& f) {
  std::vector<Field> r(g.dim());
  for (int ax = 0; ax < g.dim(); ++ax) r[ax] = g.deriv(f, ax);
  return r;
}

inline Field div(const Grid& g, const std::vector<Field>& u) {
  Field r = g.zeros();
  for (int ax = 0; ax < g.dim(); ++ax) {
    Field d = g.deriv(u[ax], ax);
    for (size_t i = 0; i < r.size(); ++i) r[i] += d[i];
  }
  return r;
}

// rank-3 gradient of a 2-tensor field: out[(i*d+j)*d+k] = d_k A_ij
inline std::vector<Field> grad_tensor(const Grid& g, const std::vector<Field>& A) {
  const int d = g.dim();
  std::vector<Field> r(static_cast<size_t>(d) * d * d);
  for (int c = 0; c < d * d; ++c)
    for (int k = 0; k < d; ++k) r[static_cast<size_t>(c) * d + k] = g.deriv(A[c], k);
  return r;
}

// divergence of a 2-tensor field: out_i = d_j A_ij
inline std::vector<Field> div_tensor(const Grid& g, const std::vector<Field>& A) {
  const int d = g.dim();
  std::vector<Field> r(static_cast<size_t>(d), g.zeros());
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Field dd = g.deriv(A[static_cast<size_t>(i) * d + j], j);
      for (size_t p = 0; p < dd.size(); ++p) r[i][p] += dd[p];
    }
  return r;
}

// Lie derivatives along a velocity field, one per tensor type:
//   0-form (intensive scalar):      L_v a = v . grad a
//   d-form (extensive scalar):      L_v b = div(b v)
//   vector-type 2-tensor (columns): L_v G = (v.grad) G - (grad v) G
//   (d-1)-form (momentum):          L_v q = div(q x v) + (grad v)^T q
// These are exactly the off-diagonal Poisson blocks (up to sign).

inline Field lie_0form(const Grid& g, const std::vector<Field>& v, const Field& a) {
  Field r = g.zeros();
  for (int ax = 0; ax < g.dim(); ++ax) {
    Field da = g.deriv(a, ax);
    for (size_t i = 0; i < r.size(); ++i) r[i] += v[ax][i] * da[i];
  }
  return r;
}

inline Field lie_dform(const Grid& g, const std::vector<Field>& v, const Field& b) {
  Field r = g.zeros();
  for (int ax = 0; ax < g.dim(); ++ax) {
    Field bv = b;
    for (size_t i = 0; i < bv.size(); ++i) bv[i] *= v[ax][i];
    Field d = g.deriv(bv, ax);
    for (size_t i = 0; i < r.size(); ++i) r[i] += d[i];
  }
  return r;
}

inline std::vector<Field> lie_vec(const Grid& g, const std::vector<Field>& v,
                                  const std::vector<Field>& G) {
  const int d = g.dim();
  std::vector<Field> r(G.size(), g.zeros());
  // (v.grad) G
  for (size_t c = 0; c < G.size(); ++c)
    for (int ax = 0; ax < d; ++ax) {
      Field dG = g.deriv(G[c], ax);
      for (size_t i = 0; i < dG.size(); ++i) r[c][i] += v[ax][i] * dG[i];
    }
  // - (grad v) G : components (i,j) -= sum_l d_l v_i * G_{l,j}
  std::vector<Field> dv(static_cast<size_t>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int l = 0; l < d; ++l) dv[static_cast<size_t>(i) * d + l] = g.deriv(v[i], l);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Field& out = r[static_cast<size_t>(i) * d + j];
      for (int l = 0; l < d; ++l) {
        const Field& a = dv[static_cast<size_t>(i) * d + l];
        const Field& b = G[static_cast<size_t>(l) * d + j];
        for (size_t p = 0; p < out.size(); ++p) out[p] -= a[p] * b[p];
      }
    }
  return r;
}

inline std::vector<Field> lie_dm1form(const Grid& g, const std::vector<Field>& v,
                                      const std::vector<Field>& q) {
  const int d = g.dim();
  std::vector<Field> r(static_cast<size_t>(d), g.zeros());
  // div(q x v): r_i = sum_j d_j (q_i v_j)
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Field qv = q[i];
      for (size_t p = 0; p < qv.size(); ++p) qv[p] *= v[j][p];
      Field dd = g.deriv(qv, j);
      for (size_t p = 0; p < dd.size(); ++p) r[i][p] += dd[p];
    }
  // (grad v)^T q: r_i += sum_j d_i v_j * q_j
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Field dv = g.deriv(v[j], i);
      for (size_t p = 0; p < dv.size(); ++p) r[i][p] += dv[p] * q[j][p];
    }
  return r;
}

// [[v,w]] = (v.grad) w - (w.grad) v
inline std::vector<Field> vec_commutator(const Grid& g, const std::vector<Field>& v,
                                         const std::vector<Field>& w) {
  const int d = g.dim();
  std::vector<Field> r(static_cast<size_t>(d), g.zeros());
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Field dwi = g.deriv(w[i], j);
      Field dvi = g.deriv(v[i], j);
      for (size_t p = 0; p < r[i].size(); ++p)
        r[i][p] += v[j][p] * dwi[p] - w[j][p] * dvi[p];
    }
  return r;
}

}  // namespace eutherm
