#pragma once

#include <random>

#include "eutherm/materials.hpp"
#include "eutherm/tensor.hpp"
#include "eutherm/thermo.hpp"

namespace testutil {

using namespace eutherm;

inline Tensor2 random_tensor(std::mt19937_64& rng, int d, double amp = 1.0) {
  std::normal_distribution<double> g(0.0, 1.0);
  Tensor2 t(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) t(i, j) = amp * g(rng);
  return t;
}

// identity plus a small perturbation; det stays positive for amp < ~0.3
inline Tensor2 random_defgrad(std::mt19937_64& rng, int d, double amp = 0.2) {
  Tensor2 t = Tensor2::identity(d);
  t += random_tensor(rng, d, amp);
  if (!(det(t) > 0.05)) return random_defgrad(rng, d, amp * 0.5);
  return t;
}

inline Vec random_vec(std::mt19937_64& rng, int d, double amp = 1.0) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec v(d);
  for (int i = 0; i < d; ++i) v[i] = amp * g(rng);
  return v;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return u(rng);
}

// random admissible pointwise state for a model, in the model's gauge
inline StateLocal random_state_local(std::mt19937_64& rng, const ThermoModel& m, int d,
                                     double margin = 0.25) {
  const AdmissibleBox bx = m.box();
  StateLocal q;
  q.p = random_vec(rng, d, 0.3);
  const double j_lo = bx.detFe_min + margin * (bx.detFe_max - bx.detFe_min);
  const double j_hi = bx.detFe_max - margin * (bx.detFe_max - bx.detFe_min);
  for (int tries = 0; tries < 200; ++tries) {
    const double target_j = uniform(rng, j_lo, j_hi);
    Tensor2 fe = random_defgrad(rng, d, 0.15);
    const double j = det(fe);
    fe *= std::pow(target_j / j, 1.0 / d);
    q.Fe = fe;
    if (det(q.Fe) > bx.detFe_min && det(q.Fe) < bx.detFe_max) break;
  }
  q.alpha = uniform(rng, bx.alpha_min + margin * (bx.alpha_max - bx.alpha_min),
                    bx.alpha_max - margin * (bx.alpha_max - bx.alpha_min));
  q.beta = uniform(rng, bx.beta_min + margin * (bx.beta_max - bx.beta_min),
                   bx.beta_max - margin * (bx.beta_max - bx.beta_min));
  const double th = uniform(rng, bx.theta_min + margin * (bx.theta_max - bx.theta_min),
                            bx.theta_max - margin * (bx.theta_max - bx.theta_min));
  q.w = th;
  ThermoModel mt = m.with_gauge(ThermalGauge::Temperature);
  switch (m.gauge()) {
    case ThermalGauge::Temperature: break;
    case ThermalGauge::InternalEnergy: q.w = mt.triple(q).e; break;
    case ThermalGauge::Entropy: q.w = mt.triple(q).s; break;
  }
  return q;
}

}  // namespace testutil
