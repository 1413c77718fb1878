#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "eutherm/errors.hpp"
#include "eutherm/fields.hpp"
#include "eutherm/tensor.hpp"

namespace eutherm {

// Thermal-variable gauge: which scalar coordinate parameterizes the thermal
// state. All constitutive output (temperature, stresses, potentials) must be
// identical across gauges at matched states; the test suite certifies that.
enum class ThermalGauge { Temperature, InternalEnergy, Entropy };

inline const char* gauge_name(ThermalGauge g) {
  switch (g) {
    case ThermalGauge::Temperature: return "theta";
    case ThermalGauge::InternalEnergy: return "e";
    default: return "s";
  }
}

// Actual (per current volume) free energy and the partials the evolution
// needs, all taken at fixed temperature. Units: psi in J/m^3 = Pa.
struct ThetaPack {
  double psi = 0;
  Tensor2 psi_Fe;
  double psi_a = 0, psi_b = 0;
  double psi_th = 0;
  Tensor2 psi_Fe_th;
  double psi_a_th = 0, psi_b_th = 0;
  double psi_th_th = 0;
};

// Model-declared admissible set. The paper-level theory only demands
// det F_e > 0 and Theta > 0; each model narrows that to a box its root
// finds and oracles can work in.
struct AdmissibleBox {
  double theta_min = 1e-3, theta_max = 1e6;
  double detFe_min = 1e-3, detFe_max = 1e3;
  double alpha_min = -1e9, alpha_max = 1e9;
  double beta_min = -1e9, beta_max = 1e9;
};

// Gauge-theta constitutive core: evaluates the actual free energy pack at
// (F_e, alpha, beta, theta). Immutable after construction; evaluation is
// re-entrant.
class ThermoCore {
 public:
  virtual ~ThermoCore() = default;
  virtual std::string name() const = 0;
  virtual ThetaPack eval(const Tensor2& Fe, double alpha, double beta, double theta) const = 0;
  virtual AdmissibleBox box() const = 0;
  virtual double rho_ref() const = 0;

  // Referential free energy (J per referential volume), when the model is
  // specified that way; default derives it from the actual one.
  virtual bool has_referential() const { return false; }
  virtual double referential_psi(const Tensor2& Fe, double alpha, double beta,
                                 double theta) const {
    return det(Fe) * eval(Fe, alpha, beta, theta).psi;
  }

  // Closed-form gauge inverses, if the model has them.
  virtual std::optional<double> theta_from_e(const Tensor2&, double, double, double) const {
    return std::nullopt;
  }
  virtual std::optional<double> theta_from_s(const Tensor2&, double, double, double) const {
    return std::nullopt;
  }

  // Rough elastic stiffness (Pa) for CFL estimates.
  virtual double stiffness_hint() const { return 1.0; }
};

// E, S and their first partials in the state's own gauge, plus the derived
// temperature. Everything downstream (Poisson operator, driving forces,
// stresses) reads from this.
struct ThermoEval {
  double theta = 0;          // absolute temperature
  double E = 0, S = 0;       // densities per actual volume
  Tensor2 E_Fe, S_Fe;
  double E_a = 0, E_b = 0, E_w = 0;
  double S_a = 0, S_b = 0, S_w = 0;
  double psi() const { return E - theta * S; }
};

struct DerivCheckEntry {
  std::string name;
  double analytic = 0;
  double fd = 0;
  double rel_err = 0;
  bool high_curvature = false;  // FD mismatch likely dominated by curvature
};

struct DerivReport {
  std::vector<DerivCheckEntry> entries;
  double worst_rel() const {
    double m = 0;
    for (const auto& e : entries) m = std::max(m, e.rel_err);
    return m;
  }
  double worst_rel_unflagged() const {
    double m = 0;
    for (const auto& e : entries)
      if (!e.high_curvature) m = std::max(m, e.rel_err);
    return m;
  }
};

class ThermoModel {
 public:
  ThermoModel() = default;
  ThermoModel(std::shared_ptr<const ThermoCore> core, ThermalGauge gauge)
      : core_(std::move(core)), gauge_(gauge) {}

  const ThermoCore& core() const { return *core_; }
  std::shared_ptr<const ThermoCore> core_ptr() const { return core_; }
  ThermalGauge gauge() const { return gauge_; }
  double rho_ref() const { return core_->rho_ref(); }
  AdmissibleBox box() const { return core_->box(); }

  ThermoModel with_gauge(ThermalGauge g) const { return ThermoModel(core_, g); }

  // Resolve the absolute temperature from the state's thermal coordinate.
  double theta_of(const StateLocal& q) const {
    switch (gauge_) {
      case ThermalGauge::Temperature:
        return q.w;
      case ThermalGauge::InternalEnergy:
        return invert_to_theta(q, /*want_e=*/true);
      default:
        return invert_to_theta(q, /*want_e=*/false);
    }
  }

  ThermoEval eval(const StateLocal& q) const {
    const double theta = theta_of(q);
    if (!(theta > 0)) throw NonpositiveTemperature("Theta = " + std::to_string(theta));
    const ThetaPack pk = core_->eval(q.Fe, q.alpha, q.beta, theta);
    const int d = q.Fe.dim();

    // gauge-theta functions at this temperature
    ThermoEval t;
    t.theta = theta;
    t.E = pk.psi - theta * pk.psi_th;
    t.S = -pk.psi_th;
    t.E_Fe = pk.psi_Fe - theta * pk.psi_Fe_th;
    t.S_Fe = Tensor2(d);
    t.S_Fe -= pk.psi_Fe_th;
    t.E_a = pk.psi_a - theta * pk.psi_a_th;
    t.S_a = -pk.psi_a_th;
    t.E_b = pk.psi_b - theta * pk.psi_b_th;
    t.S_b = -pk.psi_b_th;
    const double c_th = -theta * pk.psi_th_th;  // dE/dtheta
    t.E_w = c_th;
    t.S_w = -pk.psi_th_th;

    switch (gauge_) {
      case ThermalGauge::Temperature:
        break;
      case ThermalGauge::InternalEnergy: {
        ThermoEval r;
        r.theta = theta;
        r.E = q.w;
        r.S = t.S;
        r.E_Fe = Tensor2(d);
        r.E_a = r.E_b = 0;
        r.E_w = 1.0;
        r.S_w = 1.0 / theta;
        r.S_Fe = t.S_Fe - (1.0 / theta) * t.E_Fe;
        r.S_a = t.S_a - t.E_a / theta;
        r.S_b = t.S_b - t.E_b / theta;
        return r;
      }
      case ThermalGauge::Entropy: {
        ThermoEval r;
        r.theta = theta;
        r.E = t.E;
        r.S = q.w;
        r.S_Fe = Tensor2(d);
        r.S_a = r.S_b = 0;
        r.S_w = 1.0;
        r.E_w = theta;
        r.E_Fe = t.E_Fe - theta * t.S_Fe;
        r.E_a = t.E_a - theta * t.S_a;
        r.E_b = t.E_b - theta * t.S_b;
        return r;
      }
    }
    return t;
  }

  double temperature(const StateLocal& q) const {
    const ThermoEval t = eval(q);
    const double th = t.E_w / t.S_w;
    if (!(th > 0)) throw NonpositiveTemperature("Theta = " + std::to_string(th));
    return th;
  }

  double free_energy(const StateLocal& q) const { return eval(q).psi(); }

  // Sigma_Cauchy = (E'_Fe - Theta S'_Fe) Fe^T + (E - Theta S) I
  Tensor2 cauchy_stress(const StateLocal& q) const {
    const ThermoEval t = eval(q);
    Tensor2 s = matmul(t.E_Fe - t.theta * t.S_Fe, transpose(q.Fe));
    const double psi = t.psi();
    for (int i = 0; i < q.Fe.dim(); ++i) s(i, i) += psi;
    return s;
  }

  // Sigma_Mandel = Fe^T (E'_Fe - Theta S'_Fe)
  Tensor2 mandel_stress(const StateLocal& q) const {
    const ThermoEval t = eval(q);
    return matmul(transpose(q.Fe), t.E_Fe - t.theta * t.S_Fe);
  }

  // mu^zeta = E'_zeta - Theta S'_zeta for zeta in {alpha, beta}
  std::pair<double, double> chemical_potentials(const StateLocal& q) const {
    const ThermoEval t = eval(q);
    return {t.E_a - t.theta * t.S_a, t.E_b - t.theta * t.S_b};
  }

  // c = -theta psi''_thth > 0 (actual volume), evaluated through gauge theta
  double heat_capacity(const StateLocal& q) const {
    const double theta = theta_of(q);
    const ThetaPack pk = core_->eval(q.Fe, q.alpha, q.beta, theta);
    const double c = -theta * pk.psi_th_th;
    if (!(c > 0)) throw NonpositiveHeatCapacity("c = " + std::to_string(c));
    return c;
  }

  // (theta, e, s) triple at the state; gauge conversions preserve it.
  struct Triple {
    double theta, e, s;
  };
  Triple triple(const StateLocal& q) const {
    const double theta = theta_of(q);
    const ThetaPack pk = core_->eval(q.Fe, q.alpha, q.beta, theta);
    return {theta, pk.psi - theta * pk.psi_th, -pk.psi_th};
  }

  StateLocal change_gauge(const StateLocal& q, ThermalGauge target) const {
    if (target == gauge_) return q;
    const Triple tr = triple(q);
    StateLocal r = q;
    switch (target) {
      case ThermalGauge::Temperature: r.w = tr.theta; break;
      case ThermalGauge::InternalEnergy: r.w = tr.e; break;
      case ThermalGauge::Entropy: r.w = tr.s; break;
    }
    return r;
  }

  // Central-difference audit of every analytic partial the model exposes.
  DerivReport check_derivatives(const StateLocal& q, double h) const;

 private:
  double invert_to_theta(const StateLocal& q, bool want_e) const {
    if (want_e) {
      if (auto th = core_->theta_from_e(q.Fe, q.alpha, q.beta, q.w)) return *th;
    } else {
      if (auto th = core_->theta_from_s(q.Fe, q.alpha, q.beta, q.w)) return *th;
    }
    // e(theta) and s(theta) are strictly increasing (E'_w > 0, S'_w > 0), so
    // a safeguarded Newton on the model's theta-box converges.
    const AdmissibleBox bx = core_->box();
    auto value = [&](double th) {
      const ThetaPack pk = core_->eval(q.Fe, q.alpha, q.beta, th);
      return want_e ? (pk.psi - th * pk.psi_th) - q.w : (-pk.psi_th) - q.w;
    };
    auto slope = [&](double th) {
      const ThetaPack pk = core_->eval(q.Fe, q.alpha, q.beta, th);
      return want_e ? -th * pk.psi_th_th : -pk.psi_th_th;
    };
    double lo = bx.theta_min, hi = bx.theta_max;
    double flo = value(lo), fhi = value(hi);
    if (flo > 0 || fhi < 0)
      throw RootFindFailure(std::string("gauge inversion: w = ") + std::to_string(q.w) +
                            " outside admissible " + (want_e ? "e" : "s") + "-range [" +
                            std::to_string(flo + q.w) + ", " + std::to_string(fhi + q.w) + "]");
    double th = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
      const double f = value(th);
      if (f > 0) hi = th; else lo = th;
      const double dp = slope(th);
      double next = dp > 0 ? th - f / dp : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - th) <= 1e-15 * std::abs(th) + 1e-300) return next;
      th = next;
    }
    return th;
  }

  std::shared_ptr<const ThermoCore> core_;
  ThermalGauge gauge_ = ThermalGauge::Temperature;
};

inline DerivReport ThermoModel::check_derivatives(const StateLocal& q, double h) const {
  DerivReport rep;
  const int d = q.Fe.dim();

  struct Raw {
    std::string name;
    double analytic, fd, trunc, noise;
    size_t group;  // entries in one group share a normalization scale
  };
  std::vector<Raw> raws;

  auto probe = [&](const std::string& name, double analytic,
                   const std::function<double(const StateLocal&)>& f,
                   const std::function<StateLocal(const StateLocal&, double)>& bump,
                   double coord_scale, size_t group) {
    const double step = h * coord_scale;
    const double fp = f(bump(q, step));
    const double fm = f(bump(q, -step));
    const double f2p = f(bump(q, 2 * step));
    const double f2m = f(bump(q, -2 * step));
    const double fd = (fp - fm) / (2.0 * step);
    // central-difference error budget: step^2 f'''/6 plus cancellation noise
    const double third = (f2p - 2 * fp + 2 * fm - f2m) / (2 * step * step * step);
    const double trunc = step * step * std::abs(third) / 6.0;
    const double noise = (std::abs(fp) + std::abs(fm)) * 1e-15 / step;
    raws.push_back({name, analytic, fd, trunc, noise, group});
  };

  const ThermoEval t0 = eval(q);
  auto evalE = [this](const StateLocal& s) { return eval(s).E; };
  auto evalS = [this](const StateLocal& s) { return eval(s).S; };

  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      auto bump = [i, j](const StateLocal& s, double dx) {
        StateLocal r = s;
        r.Fe(i, j) += dx;
        return r;
      };
      const double cs = 1.0 + std::abs(q.Fe(i, j));
      probe("E_Fe" + std::to_string(i) + std::to_string(j), t0.E_Fe(i, j), evalE, bump, cs, 0);
      probe("S_Fe" + std::to_string(i) + std::to_string(j), t0.S_Fe(i, j), evalS, bump, cs, 1);
    }
  {
    auto bump = [](const StateLocal& s, double dx) { StateLocal r = s; r.alpha += dx; return r; };
    const double cs = 1.0 + std::abs(q.alpha);
    probe("E_a", t0.E_a, evalE, bump, cs, 0);
    probe("S_a", t0.S_a, evalS, bump, cs, 1);
  }
  {
    auto bump = [](const StateLocal& s, double dx) { StateLocal r = s; r.beta += dx; return r; };
    const double cs = 1.0 + std::abs(q.beta);
    probe("E_b", t0.E_b, evalE, bump, cs, 0);
    probe("S_b", t0.S_b, evalS, bump, cs, 1);
  }
  {
    auto bump = [](const StateLocal& s, double dx) { StateLocal r = s; r.w += dx; return r; };
    const double cs = 1.0 + std::abs(q.w);
    probe("E_w", t0.E_w, evalE, bump, cs, 0);
    probe("S_w", t0.S_w, evalS, bump, cs, 1);
  }

  // Second partials entering the temperature-form heat equation, audited on
  // the gauge-theta core pack.
  {
    const double theta = theta_of(q);
    const ThetaPack pk = core_->eval(q.Fe, q.alpha, q.beta, theta);
    const double ts = 1.0 + std::abs(theta);
    const double step = h * ts;
    const ThetaPack pp = core_->eval(q.Fe, q.alpha, q.beta, theta + step);
    const ThetaPack pm = core_->eval(q.Fe, q.alpha, q.beta, theta - step);
    const ThetaPack p2p = core_->eval(q.Fe, q.alpha, q.beta, theta + 2 * step);
    const ThetaPack p2m = core_->eval(q.Fe, q.alpha, q.beta, theta - 2 * step);
    auto second = [&](const std::string& name, double analytic, double v2p, double vp,
                      double vm, double v2m) {
      const double fd = (vp - vm) / (2.0 * step);
      const double third = (v2p - 2 * vp + 2 * vm - v2m) / (2 * step * step * step);
      const double trunc = step * step * std::abs(third) / 6.0;
      const double noise = (std::abs(vp) + std::abs(vm)) * 1e-15 / step;
      raws.push_back({name, analytic, fd, trunc, noise, 2});
    };
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        second("psi_Fe" + std::to_string(i) + std::to_string(j) + "_th", pk.psi_Fe_th(i, j),
               p2p.psi_Fe(i, j), pp.psi_Fe(i, j), pm.psi_Fe(i, j), p2m.psi_Fe(i, j));
    second("psi_a_th", pk.psi_a_th, p2p.psi_a, pp.psi_a, pm.psi_a, p2m.psi_a);
    second("psi_b_th", pk.psi_b_th, p2p.psi_b, pp.psi_b, pm.psi_b, p2m.psi_b);
    second("psi_th_th", pk.psi_th_th, p2p.psi_th, pp.psi_th, pm.psi_th, p2m.psi_th);
  }

  // Group scale: the largest derivative magnitude of the same function.
  // Entries that are negligible against it (identically-zero partials of
  // Pa-scale energies, say) sit below what central differences can resolve,
  // so those are normalized by the group scale instead of themselves.
  double gscale[3] = {0, 0, 0};
  for (const auto& r : raws)
    gscale[r.group] = std::max({gscale[r.group], std::abs(r.analytic), std::abs(r.fd)});
  for (const auto& r : raws) {
    DerivCheckEntry e;
    e.name = r.name;
    e.analytic = r.analytic;
    e.fd = r.fd;
    const double mag = std::max(std::abs(r.analytic), std::abs(r.fd));
    const double denom =
        mag < 1e-3 * gscale[r.group] ? std::max(gscale[r.group], 1e-300) : mag;
    const double diff = std::abs(r.analytic - r.fd);
    e.rel_err = diff / denom;
    // flag mismatches the oracle's own error budget accounts for: the FD
    // truncation near high-curvature regions (plateau fillets) dominates
    e.high_curvature = diff > 10 * r.noise && diff <= 5 * (r.trunc + r.noise);
    rep.entries.push_back(e);
  }
  return rep;
}

}  // namespace eutherm
