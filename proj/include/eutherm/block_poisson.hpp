#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "eutherm/errors.hpp"

namespace eutherm {

// Finite-dimensional laboratory for block-structured Poisson operators
//
//   J(q) = [ J11(q1)  J12(q2) ... J1N(qN) ]
//          [ J21(q2)     0    ...    0    ]   with  Jn1(qn)* = -J1n(qn),
//          [   ...                        ]        J11(q1) = J11(0) + A q1
//          [ JN1(qN)     0    ...    0    ]
//
// A is a constant 3-tensor, skew in its first two slots; the couplings are
// linear in qn. jacobi_trilinear evaluates the exact trilinear form (DJ is
// exact because the blocks are affine), and check_conditions tests the three
// equivalent conditions for the Jacobi identity.

struct BlockPoisson {
  std::vector<int> dims;                  // m1, ..., mN
  std::vector<double> J0;                 // m1*m1, skew
  std::vector<double> A;                  // m1*m1*m1: A[(i*m1+j)*m1+k]
  std::vector<std::vector<double>> B;     // per n>=2: m1*mn*mn: B[(i*mn+mu)*mn+nu]
  std::vector<double> quad;               // optional q1^2 corruption (negative control)

  int m1() const { return dims.at(0); }
  int blocks() const { return static_cast<int>(dims.size()); }
  int total_dim() const {
    int t = 0;
    for (int m : dims) t += m;
    return t;
  }
  int offset(int n) const {
    int o = 0;
    for (int k = 0; k < n; ++k) o += dims[k];
    return o;
  }

  void validate() const {
    const int m = m1();
    if (static_cast<int>(J0.size()) != m * m) throw DimensionMismatch("J0 size");
    if (static_cast<int>(A.size()) != m * m * m) throw DimensionMismatch("A size");
    if (B.size() + 1 != dims.size()) throw DimensionMismatch("coupling count");
    for (size_t n = 0; n < B.size(); ++n) {
      const int mn = dims[n + 1];
      if (static_cast<int>(B[n].size()) != m * mn * mn)
        throw DimensionMismatch("B[" + std::to_string(n) + "] size");
    }
  }

  // J11(q1) as a dense m1 x m1 matrix
  std::vector<double> j11(const std::vector<double>& q1) const {
    const int m = m1();
    std::vector<double> M(J0);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double s = 0;
        for (int k = 0; k < m; ++k) {
          double qk = q1[k];
          if (!quad.empty()) qk += quad[k] * q1[k] * q1[k];
          s += A[(static_cast<size_t>(i) * m + j) * m + k] * qk;
        }
        M[static_cast<size_t>(i) * m + j] += s;
      }
    return M;
  }

  // J1n(qn) as m1 x mn; Jn1 = -J1n^T
  std::vector<double> j1n(int n, const std::vector<double>& qn) const {
    const int m = m1(), mn = dims[n];
    const auto& Bn = B[n - 1];
    std::vector<double> M(static_cast<size_t>(m) * mn, 0.0);
    for (int i = 0; i < m; ++i)
      for (int mu = 0; mu < mn; ++mu) {
        double s = 0;
        for (int nu = 0; nu < mn; ++nu)
          s += Bn[(static_cast<size_t>(i) * mn + mu) * mn + nu] * qn[nu];
        M[static_cast<size_t>(i) * mn + mu] = s;
      }
    return M;
  }

  // full J(q) zeta
  std::vector<double> apply(const std::vector<double>& q, const std::vector<double>& z) const {
    const int m = m1();
    std::vector<double> out(total_dim(), 0.0);
    std::vector<double> q1(q.begin(), q.begin() + m);
    std::vector<double> M = j11(q1);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) out[i] += M[static_cast<size_t>(i) * m + j] * z[j];
    for (int n = 1; n < blocks(); ++n) {
      const int mn = dims[n], off = offset(n);
      std::vector<double> qn(q.begin() + off, q.begin() + off + mn);
      std::vector<double> C = j1n(n, qn);
      for (int i = 0; i < m; ++i)
        for (int mu = 0; mu < mn; ++mu) {
          const double c = C[static_cast<size_t>(i) * mn + mu];
          out[i] += c * z[off + mu];         // J1n
          out[off + mu] -= c * z[i];         // Jn1 = -J1n^T
        }
    }
    return out;
  }

  // DJ(q)[dq] zeta, exact for the affine structure (adds the quad term's
  // state dependence when the corruption is active)
  std::vector<double> dapply(const std::vector<double>& q, const std::vector<double>& dq,
                             const std::vector<double>& z) const {
    const int m = m1();
    std::vector<double> out(total_dim(), 0.0);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double s = 0;
        for (int k = 0; k < m; ++k) {
          double dk = dq[k];
          if (!quad.empty()) dk += 2.0 * quad[k] * q[k] * dq[k];
          s += A[(static_cast<size_t>(i) * m + j) * m + k] * dk;
        }
        out[i] += s * z[j];
      }
    for (int n = 1; n < blocks(); ++n) {
      const int mn = dims[n], off = offset(n);
      std::vector<double> dqn(dq.begin() + off, dq.begin() + off + mn);
      std::vector<double> C = j1n(n, dqn);
      for (int i = 0; i < m; ++i)
        for (int mu = 0; mu < mn; ++mu) {
          const double c = C[static_cast<size_t>(i) * mn + mu];
          out[i] += c * z[off + mu];
          out[off + mu] -= c * z[i];
        }
    }
    return out;
  }

  double frob_A() const {
    double s = 0;
    for (double v : A) s += v * v;
    return std::sqrt(s);
  }
  double frob_B() const {
    double s = 0;
    for (const auto& b : B)
      for (double v : b) s += v * v;
    return std::sqrt(s);
  }
  double frob_J0() const {
    double s = 0;
    for (double v : J0) s += v * v;
    return std::sqrt(s);
  }
};

namespace blockdetail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double nrm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

inline std::vector<double> randn(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

}  // namespace blockdetail

// <z1, DJ(q)[J(q) z2] z3> + cyclic permutations, normalized by the term
// magnitudes plus an operator-scale floor.
inline double jacobi_trilinear(const BlockPoisson& J, const std::vector<double>& q,
                               const std::vector<double>& z1, const std::vector<double>& z2,
                               const std::vector<double>& z3) {
  J.validate();
  if (static_cast<int>(q.size()) != J.total_dim() || q.size() != z1.size() ||
      q.size() != z2.size() || q.size() != z3.size())
    throw DimensionMismatch("jacobi_trilinear: vector sizes");
  auto term = [&](const std::vector<double>& a, const std::vector<double>& b,
                  const std::vector<double>& c) {
    std::vector<double> jb = J.apply(q, b);
    std::vector<double> d = J.dapply(q, jb, c);
    return blockdetail::dot(a, d);
  };
  const double t1 = term(z1, z2, z3);
  const double t2 = term(z2, z3, z1);
  const double t3 = term(z3, z1, z2);
  using blockdetail::nrm;
  const double dnorm = J.frob_A() + J.frob_B();
  const double jnorm = J.frob_J0() + dnorm * (1.0 + nrm(q));
  const double P = nrm(z1) * nrm(z2) * nrm(z3) * dnorm * jnorm * (1.0 + nrm(q));
  const double den = std::abs(t1) + std::abs(t2) + std::abs(t3) + 1e-3 * P + 1e-300;
  return std::abs(t1 + t2 + t3) / den;
}

struct BlockConditionsReport {
  double cond_a = 0;  // J11 Jacobi on X1
  double cond_b = 0;  // DJ11 constancy
  double cond_c = 0;  // coupling compatibility
  double tol_a = 1e-10, tol_b = 1e-12, tol_c = 1e-10;
  bool pass() const { return cond_a <= tol_a && cond_b <= tol_b && cond_c <= tol_c; }
};

inline BlockConditionsReport check_conditions(const BlockPoisson& J, int trials,
                                              uint64_t seed) {
  J.validate();
  BlockConditionsReport rep;
  std::mt19937_64 rng(seed);
  const int m = J.m1();
  using blockdetail::dot;
  using blockdetail::nrm;
  using blockdetail::randn;

  // (A): restrict everything to X1
  {
    BlockPoisson J1;
    J1.dims = {m};
    J1.J0 = J.J0;
    J1.A = J.A;
    J1.quad = J.quad;
    for (int t = 0; t < trials; ++t) {
      std::vector<double> q = randn(rng, m);
      rep.cond_a = std::max(
          rep.cond_a, jacobi_trilinear(J1, q, randn(rng, m), randn(rng, m), randn(rng, m)));
    }
  }

  // (B): DJ11 at two base points must agree. The probe is affine-vs-not, so
  // a large step costs nothing and keeps roundoff far below tolerance.
  {
    const double h = 0.25;
    double worst = 0, scale = J.frob_A() + 1e-300;
    for (int t = 0; t < trials; ++t) {
      std::vector<double> qa(m, 0.0), qb = randn(rng, m);
      std::vector<double> dir = randn(rng, m), z = randn(rng, m);
      auto fd = [&](const std::vector<double>& base) {
        std::vector<double> qp = base, qm = base;
        for (int i = 0; i < m; ++i) {
          qp[i] += h * dir[i];
          qm[i] -= h * dir[i];
        }
        std::vector<double> jp = J.j11(qp), jm = J.j11(qm);
        std::vector<double> r(m, 0.0);
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j)
            r[i] += (jp[static_cast<size_t>(i) * m + j] - jm[static_cast<size_t>(i) * m + j]) /
                    (2 * h) * z[j];
        return r;
      };
      std::vector<double> da = fd(qa), db = fd(qb);
      double diff = 0;
      for (int i = 0; i < m; ++i) diff = std::max(diff, std::abs(da[i] - db[i]));
      worst = std::max(worst, diff / (scale * nrm(dir) * nrm(z) / m + 1e-300));
    }
    rep.cond_b = worst;
  }

  // (C): <v, (A J1n(qn) zeta) w> = <zeta, Jn1(Jn1(qn)v) w> - <zeta, Jn1(Jn1(qn)w) v>
  for (int n = 1; n < J.blocks(); ++n) {
    const int mn = J.dims[n];
    for (int t = 0; t < trials; ++t) {
      std::vector<double> qn = randn(rng, mn), zeta = randn(rng, mn);
      std::vector<double> v = randn(rng, m), w = randn(rng, m);
      // x = J1n(qn) zeta
      std::vector<double> C = J.j1n(n, qn);
      std::vector<double> x(m, 0.0);
      for (int i = 0; i < m; ++i)
        for (int mu = 0; mu < mn; ++mu) x[i] += C[static_cast<size_t>(i) * mn + mu] * zeta[mu];
      // lhs = <v, (A x) w>
      double lhs = 0;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          double s = 0;
          for (int k = 0; k < m; ++k) s += J.A[(static_cast<size_t>(i) * m + j) * m + k] * x[k];
          lhs += v[i] * s * w[j];
        }
      // Jn1(y) u = -J1n(y)^T u
      auto jn1 = [&](const std::vector<double>& y, const std::vector<double>& u) {
        std::vector<double> Cy = J.j1n(n, y);
        std::vector<double> r(mn, 0.0);
        for (int i = 0; i < m; ++i)
          for (int mu = 0; mu < mn; ++mu) r[mu] -= Cy[static_cast<size_t>(i) * mn + mu] * u[i];
        return r;
      };
      std::vector<double> jv = jn1(qn, v), jw = jn1(qn, w);
      const double rhs = dot(zeta, jn1(jv, w)) - dot(zeta, jn1(jw, v));
      const double scale = J.frob_A() * J.frob_B() * nrm(v) * nrm(w) * nrm(zeta) * nrm(qn);
      rep.cond_c = std::max(rep.cond_c, std::abs(lhs - rhs) /
                                            (std::abs(lhs) + std::abs(rhs) + 1e-3 * scale + 1e-300));
    }
  }
  return rep;
}

// --------------------------------------------------------------------------
// Instance generators. Conforming instances take the Lie-Poisson structure of
// gl(k) in a random basis, with coupling blocks built from gl(k)-module
// actions; the proposition constrains structure, not magnitudes, so random
// conjugation is enough variety.
// --------------------------------------------------------------------------
enum class BlockViolation { None, JacobiA, QuadraticB, CouplingC };

inline BlockPoisson random_block_instance(int k, int n_extra, uint64_t seed,
                                          BlockViolation viol = BlockViolation::None) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int m = k * k;
  BlockPoisson J;
  J.dims.assign(1 + n_extra, m);

  // Lie-Poisson structure of gl(k): J_lin(mu) x = x^T mu - mu x^T on k x k
  // coordinate matrices, so <z1, J_lin(mu) z2> = <mu, [z2, z1]>. Build A by
  // evaluating on basis vectors: A[(I*m+J)*m+K] = (J_lin(e_K) e_J)_I with
  // e_{ba} e_{ef} = delta(a,e) e_{bf} and e_{ef} e_{ba} = delta(f,b) e_{ea}.
  J.A.assign(static_cast<size_t>(m) * m * m, 0.0);
  for (int K = 0; K < m; ++K)
    for (int Jc = 0; Jc < m; ++Jc) {
      const int a = Jc / k, b = Jc % k;   // x = e_{ab}
      const int e = K / k, f = K % k;     // mu = e_{ef}
      if (a == e) {
        const int I = b * k + f;
        J.A[(static_cast<size_t>(I) * m + Jc) * m + K] += 1.0;
      }
      if (f == b) {
        const int I = e * k + a;
        J.A[(static_cast<size_t>(I) * m + Jc) * m + K] -= 1.0;
      }
    }

  // constant part: J0 = J_lin(mu0), a 2-cocycle by construction
  std::vector<double> mu0(m);
  for (auto& v : mu0) v = gauss(rng);
  J.J0.assign(static_cast<size_t>(m) * m, 0.0);
  for (int I = 0; I < m; ++I)
    for (int Jc = 0; Jc < m; ++Jc) {
      double s = 0;
      for (int K = 0; K < m; ++K)
        s += J.A[(static_cast<size_t>(I) * m + Jc) * m + K] * mu0[K];
      J.J0[static_cast<size_t>(I) * m + Jc] = s;
    }

  // Couplings: Jn1(qn) v = rho(v) qn where rho must be an ANTI-homomorphism
  // of the bracket (the finite analogue of v -> -Lie_v). Negated left
  // multiplication rho(v) q = -v q and reversed commutator rho(v) q = qv - vq
  // both qualify. Storage: (J1n(qn))_{i,mu} = B[(i*mn+mu)*mn+nu] qn_nu with
  // Jn1 = -J1n^T, so B[(i*mn+mu)*mn+nu] = -rho(e_i)_{mu,nu}.
  for (int n = 1; n <= n_extra; ++n) {
    const int mn = m;
    std::vector<double> Bn(static_cast<size_t>(m) * mn * mn, 0.0);
    const bool negleft = (n % 2 == 1);
    for (int i = 0; i < m; ++i) {
      const int va = i / k, vb = i % k;  // v = e_{va vb}
      for (int nu = 0; nu < mn; ++nu) {
        const int qa = nu / k, qb = nu % k;  // qn = e_{qa qb}
        if (negleft) {
          // rho(v) q = -v q = -delta(vb,qa) e_{va,qb}
          if (vb == qa) {
            const int mu = va * k + qb;
            Bn[(static_cast<size_t>(i) * mn + mu) * mn + nu] += 1.0;
          }
        } else {
          // rho(v) q = q v - v q
          if (qb == va) {
            const int mu = qa * k + vb;
            Bn[(static_cast<size_t>(i) * mn + mu) * mn + nu] -= 1.0;
          }
          if (vb == qa) {
            const int mu = va * k + qb;
            Bn[(static_cast<size_t>(i) * mn + mu) * mn + nu] += 1.0;
          }
        }
      }
    }
    if (viol == BlockViolation::CouplingC && n == 1) {
      // random bilinear coupling: generically not a module action
      for (auto& v : Bn) v = 0.7 * gauss(rng);
    }
    J.B.push_back(std::move(Bn));
  }

  if (viol == BlockViolation::JacobiA) {
    // random skew-in-(i,j) tensor: generically violates Jacobi on X1
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < i; ++j)
        for (int kk = 0; kk < m; ++kk) {
          const double v = gauss(rng);
          J.A[(static_cast<size_t>(i) * m + j) * m + kk] = v;
          J.A[(static_cast<size_t>(j) * m + i) * m + kk] = -v;
        }
    for (int i = 0; i < m; ++i)
      for (int kk = 0; kk < m; ++kk) J.A[(static_cast<size_t>(i) * m + i) * m + kk] = 0.0;
  }
  if (viol == BlockViolation::QuadraticB) {
    J.quad.assign(m, 0.0);
    for (auto& v : J.quad) v = 0.5 + std::abs(gauss(rng));
  }
  return J;
}

struct EquivalenceReport {
  int conforming_total = 0, conforming_pass = 0;
  int violating_total = 0, violating_flagged = 0;
  double worst_conforming = 0;
  double tol_pass = 1e-10;
  double tol_flag = 1e-3;
};

inline EquivalenceReport equivalence_theorem_test(int trials, uint64_t seed,
                                                  BlockViolation viol = BlockViolation::CouplingC) {
  EquivalenceReport rep;
  std::mt19937_64 rng(seed);
  using blockdetail::randn;
  for (int t = 0; t < trials; ++t) {
    BlockPoisson J = random_block_instance(2, 2, seed + 31ull * t, BlockViolation::None);
    const int n = J.total_dim();
    const double r = jacobi_trilinear(J, randn(rng, n), randn(rng, n), randn(rng, n),
                                      randn(rng, n));
    rep.worst_conforming = std::max(rep.worst_conforming, r);
    ++rep.conforming_total;
    if (r <= rep.tol_pass) ++rep.conforming_pass;
  }
  for (int t = 0; t < trials; ++t) {
    BlockPoisson J = random_block_instance(2, 2, seed + 47ull * t + 1, viol);
    const int n = J.total_dim();
    bool flagged = false;
    for (int probe = 0; probe < 3 && !flagged; ++probe) {
      const double r = jacobi_trilinear(J, randn(rng, n), randn(rng, n), randn(rng, n),
                                        randn(rng, n));
      flagged = r > rep.tol_flag;
    }
    ++rep.violating_total;
    if (flagged) ++rep.violating_flagged;
  }
  return rep;
}

}  // namespace eutherm
