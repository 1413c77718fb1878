#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <vector>

#include "eutherm/errors.hpp"
#include "eutherm/thermo.hpp"

namespace eutherm {

// ---------------------------------------------------------------------------
// Piecewise polynomial in one variable, C^1 by construction, linear end
// pieces so extrapolation stays linear. Used for the mantle bulk energy.
// ---------------------------------------------------------------------------
struct PiecewisePoly {
  std::vector<double> xk;                    // breakpoints, ascending
  std::vector<std::array<double, 6>> coef;   // per interval, powers of (x - xk[i])

  double eval(double x) const {
    const size_t i = locate(x);
    const double t = x - xk[i];
    const auto& c = coef[i];
    return ((((c[5] * t + c[4]) * t + c[3]) * t + c[2]) * t + c[1]) * t + c[0];
  }
  double deriv(double x) const {
    const size_t i = locate(x);
    const double t = x - xk[i];
    const auto& c = coef[i];
    return (((5 * c[5] * t + 4 * c[4]) * t + 3 * c[3]) * t + 2 * c[2]) * t + c[1];
  }
  // antiderivative with F(xk[0]) = 0; degree must stay <= 5 after integration
  PiecewisePoly antiderivative() const {
    PiecewisePoly F;
    F.xk = xk;
    F.coef.resize(coef.size());
    double acc = 0.0;
    for (size_t i = 0; i < coef.size(); ++i) {
      const auto& c = coef[i];
      std::array<double, 6> d{};
      d[0] = acc;
      for (int k = 0; k < 5; ++k) d[k + 1] = c[k] / (k + 1);
      if (c[5] != 0.0) throw BadParameters("piecewise poly: degree too high to integrate");
      F.coef[i] = d;
      const double h = xk[i + 1] - xk[i];
      acc = ((((d[5] * h + d[4]) * h + d[3]) * h + d[2]) * h + d[1]) * h + d[0];
    }
    return F;
  }

 private:
  size_t locate(double x) const {
    if (x <= xk.front()) return 0;
    if (x >= xk[xk.size() - 2]) return coef.size() - 1;
    size_t lo = 0, hi = coef.size() - 1;
    while (lo < hi) {
      const size_t mid = (lo + hi + 1) / 2;
      if (x >= xk[mid]) lo = mid; else hi = mid - 1;
    }
    return lo;
  }
};

namespace detail {

// cubic Hermite piece on [xa, xb] from (pa, ma) to (pb, mb)
inline std::array<double, 6> hermite(double xa, double xb, double pa, double pb, double ma,
                                     double mb) {
  const double h = xb - xa;
  std::array<double, 6> c{};
  c[0] = pa;
  c[1] = ma;
  c[2] = 3 * (pb - pa) / (h * h) - (2 * ma + mb) / h;
  c[3] = -2 * (pb - pa) / (h * h * h) + (ma + mb) / (h * h);
  return c;
}

inline std::array<double, 6> linear(double p0, double slope) {
  std::array<double, 6> c{};
  c[0] = p0;
  c[1] = slope;
  return c;
}

inline std::array<double, 6> constant(double p0) { return linear(p0, 0.0); }

// cubic smoothstep from v0 at xa to v1 at xb (zero slope at both ends)
inline std::array<double, 6> smoothstep(double xa, double xb, double v0, double v1) {
  const double h = xb - xa, dv = v1 - v0;
  std::array<double, 6> c{};
  c[0] = v0;
  c[2] = 3 * dv / (h * h);
  c[3] = -2 * dv / (h * h * h);
  return c;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Quadratic oracle model: closed forms for every identity the structural
// tests need, O(1) scales. Defined directly per actual volume, so the heat
// capacity is exactly constant and both gauge inverses are analytic.
//
//   psi = (G/2)|Fe - I|^2 + (theta/theta0)[(aA/2)(alpha-alpha0)^2
//         + (aB/2)(beta-beta0)^2] + c0 (theta - theta0) - c0 theta ln(theta/theta0)
//
//   e = (G/2)|Fe - I|^2 + c0 (theta - theta0)          => theta(e) closed form
//   s = c0 ln(theta/theta0) - Q/theta0                 => theta(s) closed form
// ---------------------------------------------------------------------------
struct QuadraticParams {
  double G = 5.0;
  double a_alpha = 2.0;
  double a_beta = 3.0;
  double alpha0 = 0.3;
  double beta0 = 1.0;
  double theta0 = 2.0;
  double c0 = 4.0;
  double rho_ref = 1.0;
};

class QuadraticCore final : public ThermoCore {
 public:
  explicit QuadraticCore(const QuadraticParams& p) : p_(p) {
    if (!(p.c0 > 0) || !(p.theta0 > 0) || !(p.G > 0) || !(p.rho_ref > 0))
      throw BadParameters("quadratic model: G, c0, theta0, rho_ref must be positive");
  }
  std::string name() const override { return "quadratic"; }

  ThetaPack eval(const Tensor2& Fe, double a, double b, double th) const override {
    const int d = Fe.dim();
    ThetaPack pk;
    Tensor2 dF = Fe - Tensor2::identity(d);
    const double Q = 0.5 * p_.a_alpha * (a - p_.alpha0) * (a - p_.alpha0) +
                     0.5 * p_.a_beta * (b - p_.beta0) * (b - p_.beta0);
    const double lt = std::log(th / p_.theta0);
    pk.psi = 0.5 * p_.G * ddot(dF, dF) + (th / p_.theta0) * Q + p_.c0 * (th - p_.theta0) -
             p_.c0 * th * lt;
    pk.psi_Fe = p_.G * dF;
    pk.psi_a = (th / p_.theta0) * p_.a_alpha * (a - p_.alpha0);
    pk.psi_b = (th / p_.theta0) * p_.a_beta * (b - p_.beta0);
    pk.psi_th = Q / p_.theta0 + p_.c0 * (-lt);
    pk.psi_Fe_th = Tensor2(d);
    pk.psi_a_th = p_.a_alpha * (a - p_.alpha0) / p_.theta0;
    pk.psi_b_th = p_.a_beta * (b - p_.beta0) / p_.theta0;
    pk.psi_th_th = -p_.c0 / th;
    return pk;
  }

  AdmissibleBox box() const override {
    AdmissibleBox b;
    b.theta_min = 0.3 * p_.theta0;
    b.theta_max = 5.0 * p_.theta0;
    b.detFe_min = 0.5;
    b.detFe_max = 2.2;
    b.alpha_min = p_.alpha0 - 2.0;
    b.alpha_max = p_.alpha0 + 2.0;
    b.beta_min = std::max(0.1, p_.beta0 - 0.8);
    b.beta_max = p_.beta0 + 2.0;
    return b;
  }

  double rho_ref() const override { return p_.rho_ref; }
  double stiffness_hint() const override { return p_.G + p_.c0 * p_.theta0; }

  std::optional<double> theta_from_e(const Tensor2& Fe, double, double, double e) const override {
    Tensor2 dF = Fe - Tensor2::identity(Fe.dim());
    return p_.theta0 + (e - 0.5 * p_.G * ddot(dF, dF)) / p_.c0;
  }
  std::optional<double> theta_from_s(const Tensor2&, double a, double b, double s) const override {
    const double Q = 0.5 * p_.a_alpha * (a - p_.alpha0) * (a - p_.alpha0) +
                     0.5 * p_.a_beta * (b - p_.beta0) * (b - p_.beta0);
    return p_.theta0 * std::exp((s + Q / p_.theta0) / p_.c0);
  }

  const QuadraticParams& params() const { return p_; }

 private:
  QuadraticParams p_;
};

inline ThermoModel quadratic_test_model(const QuadraticParams& p = {}) {
  return ThermoModel(std::make_shared<QuadraticCore>(p), ThermalGauge::Temperature);
}

// ---------------------------------------------------------------------------
// Mantle model: neo-Hookean Biot-type referential energy
//
//   psihat = kappahat(J,theta) + G (J^{-2/d} tr(Fe Fe^T) - d)
//            + theta (B/2) |z + b (J - J_T)|^2 + c theta (1 - ln theta)
//            + (theta/theta_ref) barrier(z)
//
// with J = det Fe and the actual energy psi = psihat / J. The bulk part is
// built so the actual pressure p(J,theta) = -d/dJ [kappahat/J] is a C^1
// monotone curve with two exact plateaus p1(theta), p2(theta) whose
// theta-slopes are the configured Clapeyron coefficients. The z-indicator of
// [0,1] is a log-barrier scaled by theta/theta_ref, which keeps the whole
// z-dependence of the form theta*eta(Fe,z) and so keeps the heat capacity
// z-free and the (psi'_z - theta psi''_ztheta) coefficient identically zero.
// ---------------------------------------------------------------------------
struct MantleParams {
  double G = 6e10;            // Pa
  double B = 1e5;             // Biot coupling, raw units
  double b = 1.0;
  double J_T = 1.0;           // reference Jacobian (stress-free bulk)
  double c = 3e6;             // J/(m^3 K)
  double rho_ref = 3300.0;    // kg/m^3
  double theta_ref = 1600.0;  // K
  double p1 = 14e9, p2 = 24e9;            // plateau pressures at theta_ref
  double clapeyron1 = 1.6e6, clapeyron2 = -2.5e6;  // Pa/K
  double j1_lo = 0.88, j1_hi = 0.9064;    // plateau 1 span (3% density jump)
  double j2_lo = 0.80, j2_hi = 0.84;      // plateau 2 span (5% density jump)
  double slope0 = 2.5e11;     // off-plateau |dp/dJ| near J_T
  double slope1 = 4.0e11;     // deep-compression |dp/dJ|
  double deep_width = 0.02;   // transition width below plateau 2
  double fillet = 0.01;       // Clapeyron bump fillet width
  double barrier_mu = 1.0;    // J/m^3 at theta_ref
  double theta_min = 400.0, theta_max = 2400.0;
  double z_margin = 0.03;
};

struct MantleBulk {
  PiecewisePoly pbase;    // pressure at theta_ref as a function of J
  PiecewisePoly gamma;    // dp/dtheta profile
  PiecewisePoly kbase;    // -int pbase, zero at J_T
  PiecewisePoly kgamma;   // -int gamma, zero at J_T

  double pressure(double J, double th, double th_ref) const {
    return pbase.eval(J) + (th - th_ref) * gamma.eval(J);
  }
  // actual bulk energy kappa(J, theta)
  double kappa(double J, double th, double th_ref) const {
    return kbase.eval(J) + (th - th_ref) * kgamma.eval(J);
  }
  double kappa_th(double J) const { return kgamma.eval(J); }
};

inline MantleBulk build_mantle_bulk(const MantleParams& mp) {
  if (!(mp.j2_lo < mp.j2_hi && mp.j2_hi < mp.j1_lo && mp.j1_lo < mp.j1_hi &&
        mp.j1_hi < mp.J_T))
    throw BadParameters("mantle: plateau spans must be ordered j2_lo<j2_hi<j1_lo<j1_hi<J_T");
  if (!(mp.p2 > mp.p1 && mp.p1 > 0)) throw BadParameters("mantle: need p2 > p1 > 0");

  MantleBulk bulk;
  const double d4 = 0.5 * mp.slope1 * mp.deep_width;  // keeps the deep fillet monotone
  const double jdeep = mp.j2_lo - mp.deep_width;

  PiecewisePoly& p = bulk.pbase;
  p.xk = {jdeep - 0.1, jdeep, mp.j2_lo, mp.j2_hi, mp.j1_lo, mp.j1_hi, mp.J_T, mp.J_T + 0.1};
  p.coef.resize(7);
  p.coef[0] = detail::linear(mp.p2 + d4 + 0.1 * mp.slope1, -mp.slope1);
  p.coef[1] = detail::hermite(jdeep, mp.j2_lo, mp.p2 + d4, mp.p2, -mp.slope1, 0.0);
  p.coef[2] = detail::constant(mp.p2);
  p.coef[3] = detail::hermite(mp.j2_hi, mp.j1_lo, mp.p2, mp.p1, 0.0, 0.0);
  p.coef[4] = detail::constant(mp.p1);
  p.coef[5] = detail::hermite(mp.j1_hi, mp.J_T, mp.p1, 0.0, 0.0, -mp.slope0);
  p.coef[6] = detail::linear(0.0, -mp.slope0);

  PiecewisePoly& g = bulk.gamma;
  const double wf = mp.fillet;
  g.xk = {mp.j2_lo - wf - 0.1, mp.j2_lo - wf, mp.j2_lo, mp.j2_hi, mp.j2_hi + wf,
          mp.j1_lo - wf, mp.j1_lo, mp.j1_hi, mp.j1_hi + wf, mp.j1_hi + wf + 0.1};
  g.coef.resize(9);
  g.coef[0] = detail::constant(0.0);
  g.coef[1] = detail::smoothstep(mp.j2_lo - wf, mp.j2_lo, 0.0, mp.clapeyron2);
  g.coef[2] = detail::constant(mp.clapeyron2);
  g.coef[3] = detail::smoothstep(mp.j2_hi, mp.j2_hi + wf, mp.clapeyron2, 0.0);
  g.coef[4] = detail::constant(0.0);
  g.coef[5] = detail::smoothstep(mp.j1_lo - wf, mp.j1_lo, 0.0, mp.clapeyron1);
  g.coef[6] = detail::constant(mp.clapeyron1);
  g.coef[7] = detail::smoothstep(mp.j1_hi, mp.j1_hi + wf, mp.clapeyron1, 0.0);
  g.coef[8] = detail::constant(0.0);

  // kappa = -int p dJ with kappa(J_T) = 0
  auto shift_to = [](PiecewisePoly f, double x0) {
    const double v = f.eval(x0);
    for (auto& c : f.coef) c[0] -= v;
    return f;
  };
  bulk.kbase = bulk.pbase.antiderivative();
  for (auto& c : bulk.kbase.coef)
    for (auto& v : c) v = -v;
  bulk.kbase = shift_to(bulk.kbase, mp.J_T);
  bulk.kgamma = bulk.gamma.antiderivative();
  for (auto& c : bulk.kgamma.coef)
    for (auto& v : c) v = -v;
  bulk.kgamma = shift_to(bulk.kgamma, mp.J_T);
  return bulk;
}

enum class ZBind { Alpha, Beta };

class MantleCore final : public ThermoCore {
 public:
  MantleCore(const MantleParams& p, ZBind bind) : p_(p), bind_(bind) {
    if (!(p.G > 0) || !(p.c > 0) || !(p.rho_ref > 0) || !(p.B >= 0) || !(p.barrier_mu >= 0))
      throw BadParameters("mantle: bad parameters");
    bulk_ = build_mantle_bulk(p);
  }
  std::string name() const override { return "mantle"; }
  ZBind bind() const { return bind_; }
  const MantleParams& params() const { return p_; }
  const MantleBulk& bulk() const { return bulk_; }

  ThetaPack eval(const Tensor2& Fe, double alpha, double beta, double th) const override {
    const int d = Fe.dim();
    const double z = bind_ == ZBind::Alpha ? alpha : beta;
    if (!(z > 0.0 && z < 1.0)) throw Inadmissible("mantle: z must lie in (0,1)");
    const double J = det(Fe);
    if (!(J > 0)) throw Inadmissible("mantle: det Fe must be positive");
    const Tensor2 cofF = cof(Fe);

    // referential pieces
    const double kap = bulk_.kappa(J, th, p_.theta_ref);          // actual bulk energy
    const double kap_J = -bulk_.pressure(J, th, p_.theta_ref);
    const double kap_th = bulk_.kappa_th(J);
    const double kap_Jth = -bulk_.gamma.eval(J);
    const double khat = J * kap;                 // referential bulk
    const double khat_J = kap + J * kap_J;
    const double khat_th = J * kap_th;
    const double khat_Jth = kap_th + J * kap_Jth;

    const double i2 = std::pow(J, -2.0 / d);
    const double trB = ddot(Fe, Fe);
    const double neo = p_.G * (i2 * trB - d);
    // d/dFe of neo: G [2 i2 Fe - (2/d)(i2 trB / J) cof Fe]
    Tensor2 neo_Fe = (2.0 * p_.G * i2) * Fe - (2.0 * p_.G * i2 * trB / (d * J)) * cofF;

    const double X = z + p_.b * (J - p_.J_T);
    const double bar = -p_.barrier_mu * (std::log(z) + std::log(1.0 - z));
    const double bar_z = -p_.barrier_mu * (1.0 / z - 1.0 / (1.0 - z));

    const double lt = std::log(th);
    const double psihat = khat + neo + th * 0.5 * p_.B * X * X + p_.c * th * (1.0 - lt) +
                          (th / p_.theta_ref) * bar;
    Tensor2 psihat_Fe = khat_J * cofF + neo_Fe + (th * p_.B * X * p_.b) * cofF;
    const double psihat_z = th * p_.B * X + (th / p_.theta_ref) * bar_z;
    const double psihat_th = khat_th + 0.5 * p_.B * X * X - p_.c * lt + bar / p_.theta_ref;
    Tensor2 psihat_Fe_th = (khat_Jth + p_.B * X * p_.b) * cofF;
    const double psihat_z_th = p_.B * X + bar_z / p_.theta_ref;
    const double psihat_th_th = -p_.c / th;

    // actual = referential / J
    ThetaPack pk;
    const double inv_j = 1.0 / J;
    pk.psi = psihat * inv_j;
    pk.psi_Fe = inv_j * psihat_Fe - (psihat * inv_j * inv_j) * cofF;
    pk.psi_th = psihat_th * inv_j;
    pk.psi_Fe_th = inv_j * psihat_Fe_th - (psihat_th * inv_j * inv_j) * cofF;
    pk.psi_th_th = psihat_th_th * inv_j;
    if (bind_ == ZBind::Alpha) {
      pk.psi_a = psihat_z * inv_j;
      pk.psi_a_th = psihat_z_th * inv_j;
    } else {
      pk.psi_b = psihat_z * inv_j;
      pk.psi_b_th = psihat_z_th * inv_j;
    }
    return pk;
  }

  bool has_referential() const override { return true; }
  double referential_psi(const Tensor2& Fe, double alpha, double beta,
                         double th) const override {
    return det(Fe) * eval(Fe, alpha, beta, th).psi;
  }

  AdmissibleBox box() const override {
    AdmissibleBox b;
    b.theta_min = p_.theta_min;
    b.theta_max = p_.theta_max;
    b.detFe_min = p_.j2_lo - p_.deep_width - 0.05;
    b.detFe_max = p_.J_T + 0.08;
    if (bind_ == ZBind::Alpha) {
      b.alpha_min = p_.z_margin;
      b.alpha_max = 1.0 - p_.z_margin;
      b.beta_min = -1.0;
      b.beta_max = 1.0;
    } else {
      b.beta_min = p_.z_margin;
      b.beta_max = 1.0 - p_.z_margin;
      b.alpha_min = -1.0;
      b.alpha_max = 1.0;
    }
    return b;
  }

  double rho_ref() const override { return p_.rho_ref; }
  double stiffness_hint() const override { return std::max(p_.G, p_.slope0); }

 private:
  MantleParams p_;
  ZBind bind_;
  MantleBulk bulk_;
};

inline ThermoModel mantle_energy(const MantleParams& p = {}, ZBind bind = ZBind::Alpha) {
  return ThermoModel(std::make_shared<MantleCore>(p, bind), ThermalGauge::Temperature);
}

// actual pressure p = -d/dJ (kappahat / J); the state-equation curve
inline double mantle_pressure(const MantleParams& p, double J, double theta) {
  MantleBulk bulk = build_mantle_bulk(p);
  return bulk.pressure(J, theta, p.theta_ref);
}

// ---------------------------------------------------------------------------
// Shape-memory alloy multi-well model (referential):
//
//   psihat = (K/2)(J-1)^2 + min_i [ G_i (tr(Fe Bi Fe^T)/J^{2/d} - d)
//                                   - c_i theta ln(theta/theta_T) ]
//
// with Bi = Fi^{-1} Fi^{-T}, det Fi = 1. The well metric is right-invariant,
// so the energy and well selection are frame-indifferent under Fe -> R Fe.
// Hard min differentiates the active well (lowest index on ties); a log-sum-
// exp soft min with temperature tau_w gives the C^2 variant.
// ---------------------------------------------------------------------------
struct SmaParams {
  std::vector<Tensor2> wells;      // F_0 = I first; det F_i = 1
  std::vector<double> G;           // Pa, per well
  std::vector<double> c;           // J/(m^3 K), c0 > c1 = ... = cn
  double theta_T = 300.0;          // K
  double bulk_K = 5e10;            // Pa
  double rho_ref = 6500.0;
  double theta_min = 120.0, theta_max = 900.0;
  bool smooth_min = false;
  double tau_w = 0.0;              // soft-min temperature (energy units)
};

inline SmaParams default_sma_params(int d) {
  SmaParams p;
  p.wells.push_back(Tensor2::identity(d));
  const double lam = 1.05;
  if (d == 1) {
    // a single degenerate variant; 1-d keeps the well list trivial
    p.wells.push_back(Tensor2::identity(1));
  } else if (d == 2) {
    Tensor2 f1(2), f2(2);
    f1(0, 0) = lam; f1(1, 1) = 1.0 / lam;
    f2(0, 0) = 1.0 / lam; f2(1, 1) = lam;
    p.wells.push_back(f1);
    p.wells.push_back(f2);
  } else {
    for (int k = 0; k < 3; ++k) {
      Tensor2 f = Tensor2::identity(3);
      const double mu = 1.0 / std::sqrt(lam);
      for (int i = 0; i < 3; ++i) f(i, i) = (i == k) ? lam : mu;
      p.wells.push_back(f);
    }
  }
  p.G.assign(p.wells.size(), 2e10);
  p.c.assign(p.wells.size(), 2.5e6);
  p.c[0] = 3.2e6;  // austenite
  return p;
}

class SmaCore final : public ThermoCore {
 public:
  explicit SmaCore(const SmaParams& p) : p_(p) {
    if (p.wells.empty() || p.wells.size() != p.G.size() || p.wells.size() != p.c.size())
      throw BadParameters("sma: wells, G, c must have equal nonzero size");
    for (const auto& f : p.wells) {
      if (std::abs(det(f) - 1.0) > 1e-12) throw BadParameters("sma: wells must have det = 1");
      binv_.push_back(matmul(inv(f), transpose(inv(f))));
    }
    for (double g : p.G)
      if (!(g > 0)) throw BadParameters("sma: shear moduli must be positive");
    for (double ci : p.c)
      if (!(ci > 0)) throw BadParameters("sma: heat capacities must be positive");
    if (!(p.theta_T > 0)) throw BadParameters("sma: theta_T must be positive");
    if (p.smooth_min && !(p.tau_w > 0)) throw BadParameters("sma: smooth min needs tau_w > 0");
  }
  std::string name() const override { return "sma"; }
  const SmaParams& params() const { return p_; }

  // elastic well energies and their Fe-derivatives
  void well_energies(const Tensor2& Fe, std::vector<double>& g,
                     std::vector<Tensor2>* dg = nullptr) const {
    const int d = Fe.dim();
    const double J = det(Fe);
    if (!(J > 0)) throw Inadmissible("sma: det Fe must be positive");
    const double i2 = std::pow(J, -2.0 / d);
    const Tensor2 cofF = cof(Fe);
    g.resize(binv_.size());
    if (dg) dg->assign(binv_.size(), Tensor2(d));
    for (size_t i = 0; i < binv_.size(); ++i) {
      const Tensor2 FeB = matmul(Fe, binv_[i]);
      const double tr = ddot(FeB, Fe);  // tr(Fe Bi Fe^T)
      g[i] = p_.G[i] * (i2 * tr - d);
      if (dg)
        (*dg)[i] = (2.0 * p_.G[i] * i2) * FeB - (2.0 * p_.G[i] * i2 * tr / (d * J)) * cofF;
    }
  }

  size_t active_well(const Tensor2& Fe, double th) const {
    std::vector<double> g;
    well_energies(Fe, g);
    size_t best = 0;
    double bv = g[0] + thermal(0, th);
    for (size_t i = 1; i < g.size(); ++i) {
      const double v = g[i] + thermal(i, th);
      if (v < bv) { bv = v; best = i; }
    }
    return best;
  }

  // relative gap between the two lowest wells; FD oracles stay away from ties
  double tie_gap(const Tensor2& Fe, double th) const {
    std::vector<double> g;
    well_energies(Fe, g);
    double b1 = 1e300, b2 = 1e300;
    for (size_t i = 0; i < g.size(); ++i) {
      const double v = g[i] + thermal(i, th);
      if (v < b1) { b2 = b1; b1 = v; }
      else if (v < b2) b2 = v;
    }
    const double scale = std::abs(b1) + std::abs(b2) + p_.G[0];
    return (b2 - b1) / scale;
  }

  ThetaPack eval(const Tensor2& Fe, double, double, double th) const override {
    const int d = Fe.dim();
    std::vector<double> g;
    std::vector<Tensor2> dg;
    well_energies(Fe, g, &dg);
    const double J = det(Fe);
    const Tensor2 cofF = cof(Fe);

    ThetaPack pk;
    double m, m_th, m_th_th;
    Tensor2 m_Fe(d), m_Fe_th(d);
    if (!p_.smooth_min) {
      size_t i = 0;
      double bv = g[0] + thermal(0, th);
      for (size_t k = 1; k < g.size(); ++k) {
        const double v = g[k] + thermal(k, th);
        if (v < bv) { bv = v; i = k; }
      }
      m = bv;
      m_Fe = dg[i];
      m_th = thermal_th(i, th);
      m_th_th = -p_.c[i] / th;
      // m_Fe_th stays zero: wells separate Fe and theta
    } else {
      const double tau = p_.tau_w;
      std::vector<double> val(g.size()), wgt(g.size());
      double vmin = 1e300;
      for (size_t i = 0; i < g.size(); ++i) {
        val[i] = g[i] + thermal(i, th);
        vmin = std::min(vmin, val[i]);
      }
      double zsum = 0;
      for (size_t i = 0; i < g.size(); ++i) {
        wgt[i] = std::exp(-(val[i] - vmin) / tau);
        zsum += wgt[i];
      }
      for (auto& w : wgt) w /= zsum;
      m = vmin - tau * std::log(zsum);
      double h1 = 0, h2 = 0, hvar = 0;
      for (size_t i = 0; i < g.size(); ++i) {
        m_Fe += wgt[i] * dg[i];
        h1 += wgt[i] * thermal_th(i, th);
        h2 += wgt[i] * (-p_.c[i] / th);
      }
      for (size_t i = 0; i < g.size(); ++i) {
        const double dh = thermal_th(i, th) - h1;
        hvar += wgt[i] * dh * dh;
        m_Fe_th += (-(1.0 / tau) * wgt[i] * dh) * dg[i];
      }
      m_th = h1;
      m_th_th = h2 - hvar / tau;
    }

    const double khat = 0.5 * p_.bulk_K * (J - 1.0) * (J - 1.0);
    const double khat_J = p_.bulk_K * (J - 1.0);
    const double psihat = khat + m;
    Tensor2 psihat_Fe = khat_J * cofF + m_Fe;

    const double inv_j = 1.0 / J;
    pk.psi = psihat * inv_j;
    pk.psi_Fe = inv_j * psihat_Fe - (psihat * inv_j * inv_j) * cofF;
    pk.psi_th = m_th * inv_j;
    pk.psi_Fe_th = inv_j * m_Fe_th - (m_th * inv_j * inv_j) * cofF;
    pk.psi_th_th = m_th_th * inv_j;
    return pk;
  }

  bool has_referential() const override { return true; }
  double referential_psi(const Tensor2& Fe, double a, double b, double th) const override {
    return det(Fe) * eval(Fe, a, b, th).psi;
  }

  AdmissibleBox box() const override {
    AdmissibleBox b;
    b.theta_min = p_.theta_min;
    b.theta_max = p_.theta_max;
    b.detFe_min = 0.7;
    b.detFe_max = 1.4;
    b.alpha_min = -1.0;
    b.alpha_max = 1.0;
    b.beta_min = -1.0;
    b.beta_max = 1.0;
    return b;
  }
  double rho_ref() const override { return p_.rho_ref; }
  double stiffness_hint() const override { return std::max(p_.bulk_K, p_.G[0]); }

  double thermal(size_t i, double th) const { return -p_.c[i] * th * std::log(th / p_.theta_T); }
  double thermal_th(size_t i, double th) const {
    return -p_.c[i] * (std::log(th / p_.theta_T) + 1.0);
  }

 private:
  SmaParams p_;
  std::vector<Tensor2> binv_;  // Bi = Fi^{-1} Fi^{-T}
};

inline ThermoModel sma_energy(const SmaParams& p) {
  return ThermoModel(std::make_shared<SmaCore>(p), ThermalGauge::Temperature);
}

// ---------------------------------------------------------------------------
// Dissipation data: viscosity, diffusivities, heat conductivity, plastic
// potential, source coefficient. Coefficient matrices are SPD scalars times
// identity by default; the (Fe, z, theta) arguments keep the interface ready
// for state dependence.
// ---------------------------------------------------------------------------
struct DissipationSpec {
  double visc_shear = 0.0;   // Pa s, acts on dev D
  double visc_bulk = 0.0;    // Pa s, acts on tr D
  double diff_alpha = 0.0;   // A_diff
  double diff_beta = 0.0;    // B_diff
  double heat_k = 0.0;       // K_heat
  double source_a = 0.0;     // A_source >= 0

  enum class Plast { None, Quadratic, Perzyna, Power };
  Plast plast = Plast::None;
  double plast_eta = 1.0;
  double yield0 = 0.0, yield_slope = 0.0;
  double plast_exponent = 2.0;
  double eps_reg = 1e-6;

  void validate() const {
    if (visc_shear < 0 || visc_bulk < 0 || diff_alpha < 0 || diff_beta < 0 || heat_k < 0 ||
        source_a < 0)
      throw BadParameters("dissipation: coefficients must be nonnegative");
    if (plast != Plast::None && !(plast_eta > 0))
      throw BadParameters("dissipation: plast_eta must be positive");
    if (plast == Plast::Power && !(plast_exponent > 1))
      throw BadParameters("dissipation: plast_exponent must exceed 1");
    if (!(eps_reg > 0)) throw BadParameters("dissipation: eps_reg must be positive");
  }

  bool all_zero() const {
    return visc_shear == 0 && visc_bulk == 0 && diff_alpha == 0 && diff_beta == 0 &&
           heat_k == 0 && source_a == 0 && plast == Plast::None;
  }

  // D_visc(q) D = 2 nu_sh dev D + nu_bk tr(D) I
  Tensor2 visc_action(const Tensor2& D) const {
    Tensor2 r = (2.0 * visc_shear) * dev(D);
    const double tr = visc_bulk * trace(D);
    for (int i = 0; i < D.dim(); ++i) r(i, i) += tr;
    return r;
  }

  double sigma_yield(double theta) const { return std::max(yield0 + yield_slope * theta, 0.0); }

  // local dual plastic potential on xi = dev Sigma_Mandel, and its gradient
  double rplast_value(const Tensor2& xi, double theta) const {
    const double n = frob(xi);
    switch (plast) {
      case Plast::None: return 0.0;
      case Plast::Quadratic: return 0.5 * n * n / plast_eta;
      case Plast::Perzyna: {
        const double ex = std::max(n - sigma_yield(theta), 0.0);
        return 0.5 * ex * ex / plast_eta;
      }
      case Plast::Power: {
        const double q = plast_exponent, e = eps_reg_scale();
        return (std::pow(n * n + e * e, 0.5 * q) - std::pow(e, q)) / (q * plast_eta);
      }
    }
    return 0.0;
  }

  Tensor2 rplast_grad(const Tensor2& xi, double theta) const {
    const int d = xi.dim();
    const double n = frob(xi);
    switch (plast) {
      case Plast::None: return Tensor2(d);
      case Plast::Quadratic: return (1.0 / plast_eta) * xi;
      case Plast::Perzyna: {
        const double ex = std::max(n - sigma_yield(theta), 0.0);
        if (ex == 0.0 || n == 0.0) return Tensor2(d);
        return (ex / (plast_eta * n)) * xi;
      }
      case Plast::Power: {
        const double q = plast_exponent, e = eps_reg_scale();
        return (std::pow(n * n + e * e, 0.5 * q - 1.0) / plast_eta) * xi;
      }
    }
    return Tensor2(d);
  }

  double eps_reg_scale() const { return eps_reg; }

  Tensor2 k_diff_alpha(int d) const { return diff_alpha * Tensor2::identity(d); }
  Tensor2 k_diff_beta(int d) const { return diff_beta * Tensor2::identity(d); }
  Tensor2 k_heat(int d) const { return heat_k * Tensor2::identity(d); }
};

// ---------------------------------------------------------------------------
// Gibbs-simplex phase indicator for the SMA dissipation: softmax over the
// negative elastic well energies of an SmaCore.
// ---------------------------------------------------------------------------
struct PhaseIndicator {
  std::shared_ptr<const SmaCore> sma;
  double tau_lambda = 1e8;  // energy scale of the softmax

  std::vector<double> lambda(const Tensor2& Fe) const {
    std::vector<double> g;
    sma->well_energies(Fe, g);
    std::vector<double> l(g.size());
    double gmin = 1e300;
    for (double v : g) gmin = std::min(gmin, v);
    double z = 0;
    for (size_t i = 0; i < g.size(); ++i) {
      l[i] = std::exp(-(g[i] - gmin) / tau_lambda);
      z += l[i];
    }
    for (auto& v : l) v /= z;
    return l;
  }

  // d lambda_i / d Fe
  std::vector<Tensor2> lambda_prime(const Tensor2& Fe) const {
    std::vector<double> g;
    std::vector<Tensor2> dg;
    sma->well_energies(Fe, g, &dg);
    std::vector<double> l = lambda(Fe);
    const int d = Fe.dim();
    Tensor2 mean(d);
    for (size_t j = 0; j < l.size(); ++j) mean += l[j] * dg[j];
    std::vector<Tensor2> lp(l.size(), Tensor2(d));
    for (size_t i = 0; i < l.size(); ++i) lp[i] = (-l[i] / tau_lambda) * (dg[i] - mean);
    return lp;
  }
};

inline double huber(double r, double eps) {
  return std::abs(r) <= eps ? 0.5 * r * r / eps : std::abs(r) - 0.5 * eps;
}

// SMA rate potential r(Fe,theta; L, L_p): activation of phase interfaces plus
// yield-stress plasticity, Huber-smoothed. Convex in (L, L_p); r(...,0,0)=0.
inline double sma_dissipation(const PhaseIndicator& ind, double sigma_theta, double eps_reg,
                              const Tensor2& Fe, const Tensor2& L, const Tensor2& Lp) {
  const std::vector<Tensor2> lp = ind.lambda_prime(Fe);
  const Tensor2 rate = matmul(L - Lp, Fe);  // d/dt of Fe along (L - L_p) Fe
  double s2 = 0;
  for (const auto& m : lp) {
    const double y = ddot(m, rate);
    s2 += y * y;
  }
  return huber(std::sqrt(s2), eps_reg) + sigma_theta * huber(frob(Lp), eps_reg);
}

}  // namespace eutherm
