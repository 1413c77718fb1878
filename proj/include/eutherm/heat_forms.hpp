#pragma once

#include <cmath>
#include <random>

#include "eutherm/thermo.hpp"

namespace eutherm {

// Pointwise consistency between the temperature-form heat equation and the
// internal-energy balance. Both are evaluated from the same free-energy pack
// at a state with prescribed local rates; the shared production/flux scalar
// h0 stands in for p_heat - div(K grad(1/theta)) and cancels in the residual.
//
// Temperature form (c = -theta psi''_thth):
//   c dtheta/dt = h0 + theta (psi''_Feth Fe^T) : L - theta (Fe^T psi''_Feth) : Lp
//                 + theta psi'_th tr L
//                 - (psi'_a - theta psi''_ath) da/dt
//                 - (psi'_b - theta psi''_bth) db/dt - psi'_b beta tr L
//
// Energy form, mapped through e = psi - theta psi'_th:
//   de/dt + e tr L = h0 + (psi'_Fe Fe^T + psi I) : L - (Fe^T psi'_Fe) : Lp
//                    - psi'_b beta tr L
// with de/dt = e'_Fe : dFe/dt + e'_a da/dt + e'_b db/dt + c dtheta/dt and
// dFe/dt = L Fe - Fe Lp.
struct HeatFormSample {
  Tensor2 Fe;
  double alpha = 0, beta = 0;
  double theta = 0;
  Tensor2 L, Lp;       // velocity gradient and inelastic distortion rate
  double alpha_dot = 0, beta_dot = 0;
  double h0 = 0;       // common heat production / flux scalar
};

struct HeatFormResult {
  double lhs_theta_form = 0;   // c dtheta/dt from the temperature route
  double lhs_energy_form = 0;  // same quantity recovered from the energy route
  double residual = 0;         // |difference| / term scale
  double ansatz_alpha = 0;     // (psi'_a - theta psi''_ath), 0 under the split ansatz
  double ansatz_beta = 0;
};

struct FormEquivalenceReport {
  double max_residual = 0;
  double max_ansatz_alpha = 0;  // normalized |psi'_a - theta psi''_ath|
  double max_ansatz_beta = 0;
  int samples = 0;
};

inline HeatFormResult heat_form_check(const ThermoModel& model, const HeatFormSample& smp);

// Samples random admissible pointwise states with random local rates and
// reports the worst disagreement between the two heat-equation forms.
inline FormEquivalenceReport check_form_equivalence(const ThermoModel& model, int trials,
                                                    uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const AdmissibleBox bx = model.box();
  auto uni = [&](double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    return u(rng);
  };
  FormEquivalenceReport rep;
  const int d = 2;
  for (int t = 0; t < trials; ++t) {
    HeatFormSample smp;
    smp.Fe = Tensor2::identity(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) smp.Fe(i, j) += 0.15 * gauss(rng);
    const double jtarget = uni(0.7 * bx.detFe_min + 0.3 * bx.detFe_max,
                               0.3 * bx.detFe_min + 0.7 * bx.detFe_max);
    smp.Fe *= std::pow(jtarget / det(smp.Fe), 1.0 / d);
    smp.alpha = uni(0.7 * bx.alpha_min + 0.3 * bx.alpha_max,
                    0.3 * bx.alpha_min + 0.7 * bx.alpha_max);
    smp.beta = uni(0.7 * bx.beta_min + 0.3 * bx.beta_max,
                   0.3 * bx.beta_min + 0.7 * bx.beta_max);
    smp.theta = uni(0.7 * bx.theta_min + 0.3 * bx.theta_max,
                    0.3 * bx.theta_min + 0.7 * bx.theta_max);
    smp.L = Tensor2(d);
    smp.Lp = Tensor2(d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        smp.L(i, j) = 0.5 * gauss(rng);
        smp.Lp(i, j) = 0.5 * gauss(rng);
      }
    smp.Lp = dev(smp.Lp);
    smp.alpha_dot = gauss(rng);
    smp.beta_dot = gauss(rng);
    smp.h0 = gauss(rng);
    const HeatFormResult r = heat_form_check(model, smp);
    rep.max_residual = std::max(rep.max_residual, r.residual);
    const ThetaPack pk = model.core().eval(smp.Fe, smp.alpha, smp.beta, smp.theta);
    const double za = std::abs(pk.psi_a) + std::abs(smp.theta * pk.psi_a_th) + 1e-300;
    const double zb = std::abs(pk.psi_b) + std::abs(smp.theta * pk.psi_b_th) + 1e-300;
    rep.max_ansatz_alpha = std::max(rep.max_ansatz_alpha, std::abs(r.ansatz_alpha) / za);
    rep.max_ansatz_beta = std::max(rep.max_ansatz_beta, std::abs(r.ansatz_beta) / zb);
    ++rep.samples;
  }
  return rep;
}

inline HeatFormResult heat_form_check(const ThermoModel& model, const HeatFormSample& smp) {
  const ThetaPack pk = model.core().eval(smp.Fe, smp.alpha, smp.beta, smp.theta);
  const int d = smp.Fe.dim();
  const double th = smp.theta;
  const double trL = trace(smp.L);
  const Tensor2 feT = transpose(smp.Fe);

  const double c_heat = -th * pk.psi_th_th;

  const double coeff_a = pk.psi_a - th * pk.psi_a_th;
  const double coeff_b = pk.psi_b - th * pk.psi_b_th;

  // temperature route
  double lhs1 = smp.h0;
  lhs1 += th * ddot(matmul(pk.psi_Fe_th, feT), smp.L);
  lhs1 -= th * ddot(matmul(feT, pk.psi_Fe_th), smp.Lp);
  lhs1 += th * pk.psi_th * trL;
  lhs1 -= coeff_a * smp.alpha_dot;
  lhs1 -= coeff_b * smp.beta_dot;
  lhs1 -= pk.psi_b * smp.beta * trL;

  // energy route
  const double e = pk.psi - th * pk.psi_th;
  const Tensor2 e_Fe = pk.psi_Fe - th * pk.psi_Fe_th;
  const double e_a = coeff_a, e_b = coeff_b;
  const Tensor2 fedot = matmul(smp.L, smp.Fe) - matmul(smp.Fe, smp.Lp);

  double rhs = smp.h0;
  rhs += ddot(matmul(pk.psi_Fe, feT), smp.L) + pk.psi * trL;
  rhs -= ddot(matmul(feT, pk.psi_Fe), smp.Lp);
  rhs -= pk.psi_b * smp.beta * trL;
  double lhs2 = rhs - e * trL - ddot(e_Fe, fedot) - e_a * smp.alpha_dot - e_b * smp.beta_dot;

  HeatFormResult r;
  r.lhs_theta_form = lhs1;
  r.lhs_energy_form = lhs2;
  const double scale =
      std::max({std::abs(smp.h0), std::abs(th * pk.psi_th * trL), std::abs(e * trL),
                std::abs(ddot(matmul(pk.psi_Fe, feT), smp.L)), std::abs(c_heat * th),
                std::abs(coeff_a * smp.alpha_dot) + std::abs(coeff_b * smp.beta_dot), 1e-300});
  r.residual = std::abs(lhs1 - lhs2) / scale;
  r.ansatz_alpha = coeff_a;
  r.ansatz_beta = coeff_b;
  return r;
}

}  // namespace eutherm
