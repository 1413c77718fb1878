#pragma once

#include <vector>

#include "eutherm/lie.hpp"
#include "eutherm/state_eval.hpp"

namespace eutherm {

// Entropy density and its slopes as fields. In the entropy gauge these are
// state components and constants, so the operator never touches the model;
// that makes the Poisson operator affine in the state, which the Jacobi
// finite-difference certificate exploits.
struct EntropyPack {
  Grid grid;
  Field S;
  std::vector<Field> S_Fe;
  Field S_a, S_b, S_w;
};

inline EntropyPack entropy_pack(const ThermoModel& m, const QFields& q) {
  const Grid& g = q.grid;
  const int d = g.dim();
  EntropyPack e;
  e.grid = g;
  if (m.gauge() == ThermalGauge::Entropy) {
    e.S = q.w;
    e.S_Fe.assign(static_cast<size_t>(d) * d, g.zeros());
    e.S_a = g.zeros();
    e.S_b = g.zeros();
    e.S_w = Field(g.num_points(), 1.0);
    return e;
  }
  ThermoFields t = thermo_fields(m, q);
  e.S = std::move(t.S);
  e.S_Fe = std::move(t.S_Fe);
  e.S_a = std::move(t.S_a);
  e.S_b = std::move(t.S_b);
  e.S_w = std::move(t.S_w);
  return e;
}

// Test hook: deliberate structure corruptions for negative controls.
enum class PoissonCorruption { None, FlipJpBeta };

// The Poisson operator J(q) with the one-row/one-column block structure:
// only the momentum row and column couple to the other state components.
class PoissonApply {
 public:
  PoissonApply(const ThermoModel& m, QFields q,
               PoissonCorruption corrupt = PoissonCorruption::None)
      : model_(m), q_(std::move(q)), corrupt_(corrupt) {
    ent_ = entropy_pack(model_, q_);
    for (size_t i = 0; i < ent_.S_w.size(); ++i)
      if (!(ent_.S_w[i] > 0))
        throw DegenerateEntropySlope("S'_w <= 0 at a grid point");
  }

  const Grid& grid() const { return q_.grid; }
  const QFields& state() const { return q_; }
  const ThermoModel& model() const { return model_; }
  const EntropyPack& entropy() const { return ent_; }

  // tangent = J(q) zeta
  QFields apply(const ZFields& z) const {
    const Grid& g = q_.grid;
    check_same_grid(g, z.grid);
    const int d = g.dim();
    const size_t n = g.num_points();
    QFields out(g);

    // rows F_e, alpha, beta: minus the Lie transport along zeta^p
    {
      std::vector<Field> lf = lie_vec(g, z.zp, q_.Fe);
      for (size_t c = 0; c < lf.size(); ++c)
        for (size_t i = 0; i < n; ++i) out.Fe[c][i] = -lf[c][i];
    }
    {
      Field la = lie_0form(g, z.zp, q_.alpha);
      Field lb = lie_dform(g, z.zp, q_.beta);
      for (size_t i = 0; i < n; ++i) {
        out.alpha[i] = -la[i];
        out.beta[i] = -lb[i];
      }
    }

    // w row: J^{w p} = -(J^{p w})^*, which combines the transport rows so the
    // entropy density is carried as an extensive variable:
    //   J^{wp} zp = -(1/S'_w)[ div(S zp) + S'_Fe : J^{Fe p} zp
    //                          + S'_a J^{a p} zp + S'_b J^{b p} zp ]
    {
      Field divS = lie_dform(g, z.zp, ent_.S);
      for (size_t i = 0; i < n; ++i) {
        double acc = divS[i];
        for (int c = 0; c < d * d; ++c) acc += ent_.S_Fe[c][i] * out.Fe[c][i];
        acc += ent_.S_a[i] * out.alpha[i];
        acc += ent_.S_b[i] * out.beta[i];
        out.w[i] = -acc / ent_.S_w[i];
      }
    }

    // momentum row
    std::vector<Field> prow = jpp(z.zp);
    accumulate_jpfe(prow, z.zFe);
    accumulate_jpa(prow, z.za);
    accumulate_jpb(prow, z.zb);
    // J^{pw} omega = -S grad(omega/S'_w) - J^{pFe}((omega/S'_w) S'_Fe)
    //               - J^{pa}((omega/S'_w) S'_a) - J^{pb}((omega/S'_w) S'_b)
    {
      Field u(n);
      for (size_t i = 0; i < n; ++i) u[i] = z.zw[i] / ent_.S_w[i];
      for (int ax = 0; ax < d; ++ax) {
        Field du = g.deriv(u, ax);
        for (size_t i = 0; i < n; ++i) prow[ax][i] -= ent_.S[i] * du[i];
      }
      std::vector<Field> xi(static_cast<size_t>(d) * d, g.zeros());
      for (int c = 0; c < d * d; ++c)
        for (size_t i = 0; i < n; ++i) xi[c][i] = u[i] * ent_.S_Fe[c][i];
      accumulate_jpfe(prow, xi, -1.0);
      Field ua(n), ub(n);
      for (size_t i = 0; i < n; ++i) {
        ua[i] = u[i] * ent_.S_a[i];
        ub[i] = u[i] * ent_.S_b[i];
      }
      accumulate_jpa(prow, ua, -1.0);
      accumulate_jpb(prow, ub, -1.0);
    }
    for (int i = 0; i < d; ++i) out.p[i] = std::move(prow[i]);
    return out;
  }

 private:
  // J^{pp}(q) zeta = -div(p x zeta) - (grad zeta)^T p = -L^{(d-1)-form}_zeta p
  std::vector<Field> jpp(const std::vector<Field>& zp) const {
    std::vector<Field> lf = lie_dm1form(q_.grid, zp, q_.p);
    for (auto& f : lf)
      for (auto& v : f) v = -v;
    return lf;
  }

  // J^{p Fe}(q) Xi = grad(Fe) : Xi + div(Xi Fe^T)
  void accumulate_jpfe(std::vector<Field>& acc, const std::vector<Field>& xi,
                       double sign = 1.0) const {
    const Grid& g = q_.grid;
    const int d = g.dim();
    const size_t n = g.num_points();
    for (int ax = 0; ax < d; ++ax) {
      // (grad Fe : Xi)_ax = sum_{jk} Xi_{jk} d_ax Fe_{jk}
      for (int c = 0; c < d * d; ++c) {
        Field df = g.deriv(q_.Fe[c], ax);
        for (size_t i = 0; i < n; ++i) acc[ax][i] += sign * xi[c][i] * df[i];
      }
    }
    // div(Xi Fe^T)_i = d_j (Xi_{ik} Fe_{jk})
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        Field m = g.zeros();
        for (int k = 0; k < d; ++k) {
          const Field& a = xi[static_cast<size_t>(i) * d + k];
          const Field& b = q_.Fe[static_cast<size_t>(j) * d + k];
          for (size_t p = 0; p < n; ++p) m[p] += a[p] * b[p];
        }
        Field dm = g.deriv(m, j);
        for (size_t p = 0; p < n; ++p) acc[i][p] += sign * dm[p];
      }
  }

  // J^{pa}(q) a = a grad(alpha)
  void accumulate_jpa(std::vector<Field>& acc, const Field& a, double sign = 1.0) const {
    const Grid& g = q_.grid;
    for (int ax = 0; ax < g.dim(); ++ax) {
      Field da = g.deriv(q_.alpha, ax);
      for (size_t i = 0; i < da.size(); ++i) acc[ax][i] += sign * a[i] * da[i];
    }
  }

  // J^{pb}(q) b = -beta grad(b)
  void accumulate_jpb(std::vector<Field>& acc, const Field& b, double sign = 1.0) const {
    const Grid& g = q_.grid;
    const double flip = corrupt_ == PoissonCorruption::FlipJpBeta ? -1.0 : 1.0;
    for (int ax = 0; ax < g.dim(); ++ax) {
      Field db = g.deriv(b, ax);
      for (size_t i = 0; i < db.size(); ++i)
        acc[ax][i] -= flip * sign * q_.beta[i] * db[i];
    }
  }

  ThermoModel model_;
  QFields q_;
  PoissonCorruption corrupt_;
  EntropyPack ent_;
};

// Hamiltonian vector field, assembled two ways.
//
// Raw route: J(q) DE(q).
inline QFields v_ham_raw(const PoissonApply& P) {
  ThermoFields t = thermo_fields(P.model(), P.state());
  ZFields de = de_fields(P.model(), P.state(), t);
  return P.apply(de);
}

// Simplified route: the momentum row collapses to the divergence of the
// Cauchy stress with the extensive-variable pressure correction
// p^(beta) = beta (E'_b - Theta S'_b):
//   d/dt p = -div(rho v x v) + div( Sigma~ Fe^T + (psi - p^(beta)) I )
inline QFields v_ham_simplified_with(const ThermoModel&, const QFields& q,
                                     const ThermoFields& t) {
  const Grid& g = q.grid;
  const int d = g.dim();
  const size_t n = g.num_points();
  QFields out(g);

  // transport rows along v
  {
    std::vector<Field> lf = lie_vec(g, t.v, q.Fe);
    for (size_t c = 0; c < lf.size(); ++c)
      for (size_t i = 0; i < n; ++i) out.Fe[c][i] = -lf[c][i];
    Field la = lie_0form(g, t.v, q.alpha);
    Field lb = lie_dform(g, t.v, q.beta);
    for (size_t i = 0; i < n; ++i) {
      out.alpha[i] = -la[i];
      out.beta[i] = -lb[i];
    }
  }
  // w row = V^S_Ham (entropy transported as an extensive variable)
  {
    Field divS = lie_dform(g, t.v, t.S);
    for (size_t i = 0; i < n; ++i) {
      double acc = divS[i];
      for (int c = 0; c < d * d; ++c) acc += t.S_Fe[c][i] * out.Fe[c][i];
      acc += t.S_a[i] * out.alpha[i];
      acc += t.S_b[i] * out.beta[i];
      out.w[i] = -acc / t.S_w[i];
    }
  }
  // momentum row
  {
    // total stress T = (E'_Fe - Theta S'_Fe) Fe^T + (psi - beta mu^b) I
    std::vector<Field> T(static_cast<size_t>(d) * d, g.zeros());
    parallel_for(n, [&](size_t id) {
      const StateLocal ql = q.at(id);
      Tensor2 sig(d), efe(d), sfe(d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          efe(i, j) = t.E_Fe[static_cast<size_t>(i) * d + j][id];
          sfe(i, j) = t.S_Fe[static_cast<size_t>(i) * d + j][id];
        }
      const double th = t.theta[id];
      sig = matmul(efe - th * sfe, transpose(ql.Fe));
      const double psi = t.E[id] - th * t.S[id];
      const double pbeta = ql.beta * (t.E_b[id] - th * t.S_b[id]);
      for (int i = 0; i < d; ++i) sig(i, i) += psi - pbeta;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) T[static_cast<size_t>(i) * d + j][id] = sig(i, j);
    });
    for (int i = 0; i < d; ++i) {
      Field row = g.zeros();
      // -div(rho v x v)
      for (int j = 0; j < d; ++j) {
        Field m(n);
        for (size_t p = 0; p < n; ++p) m[p] = t.rho[p] * t.v[i][p] * t.v[j][p];
        Field dm = g.deriv(m, j);
        for (size_t p = 0; p < n; ++p) row[p] -= dm[p];
      }
      // + div T
      for (int j = 0; j < d; ++j) {
        Field dm = g.deriv(T[static_cast<size_t>(i) * d + j], j);
        for (size_t p = 0; p < n; ++p) row[p] += dm[p];
      }
      out.p[i] = std::move(row);
    }
  }
  return out;
}

inline QFields v_ham_simplified(const ThermoModel& m, const QFields& q) {
  return v_ham_simplified_with(m, q, thermo_fields(m, q));
}

}  // namespace eutherm
