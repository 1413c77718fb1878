#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "eutherm/materials.hpp"
#include "eutherm/thermo.hpp"
#include "test_util.hpp"

using namespace eutherm;
using testutil::random_state_local;

namespace {

// toy model with S(e) = c ln(e/e0): psi(theta) = c theta (1 - ln(c theta / e0)),
// so E = c theta and Theta in the e-gauge is e/c. No closed-form hooks, which
// makes it exercise the safeguarded Newton inversion.
class ToyLogCore final : public ThermoCore {
 public:
  ToyLogCore(double c, double e0) : c_(c), e0_(e0) {}
  std::string name() const override { return "toylog"; }
  ThetaPack eval(const Tensor2& Fe, double, double, double th) const override {
    ThetaPack pk;
    pk.psi_Fe = Tensor2(Fe.dim());
    pk.psi_Fe_th = Tensor2(Fe.dim());
    pk.psi = c_ * th * (1.0 - std::log(c_ * th / e0_));
    pk.psi_th = -c_ * std::log(c_ * th / e0_);
    pk.psi_th_th = -c_ / th;
    return pk;
  }
  AdmissibleBox box() const override {
    AdmissibleBox b;
    b.theta_min = 0.05;
    b.theta_max = 1e4;
    return b;
  }
  double rho_ref() const override { return 1.0; }
 private:
  double c_, e0_;
};

const std::vector<ThermalGauge> kGauges = {ThermalGauge::Temperature,
                                           ThermalGauge::InternalEnergy,
                                           ThermalGauge::Entropy};

}  // namespace

TEST_CASE("temperature across gauges", "[thermo]") {
  ThermoModel mq = quadratic_test_model();
  std::mt19937_64 rng(101);

  // gauge theta: w IS the temperature
  for (int t = 0; t < 20; ++t) {
    StateLocal q = random_state_local(rng, mq, 2);
    CHECK(mq.temperature(q) == Catch::Approx(q.w).epsilon(1e-14));
  }

  // toy log model in gauge e: Theta = e / c
  const double c = 3.0, e0 = 2.0;
  ThermoModel toy(std::make_shared<ToyLogCore>(c, e0), ThermalGauge::InternalEnergy);
  StateLocal q;
  q.p = Vec(2);
  q.Fe = Tensor2::identity(2);
  q.w = 7.5;  // e
  CHECK(toy.temperature(q) == Catch::Approx(q.w / c).epsilon(1e-12));

  // gauge s: Theta = E'_s since S'_s = 1
  ThermoModel ms = mq.with_gauge(ThermalGauge::Entropy);
  for (int t = 0; t < 10; ++t) {
    StateLocal qs = random_state_local(rng, ms, 2);
    const ThermoEval te = ms.eval(qs);
    CHECK(te.S_w == 1.0);
    CHECK(ms.temperature(qs) == Catch::Approx(te.E_w).epsilon(1e-14));
  }

  StateLocal bad = q;
  bad.w = -1.0;
  CHECK_THROWS_AS(quadratic_test_model().eval(bad), NonpositiveTemperature);
}

TEST_CASE("free energy and the Gibbs relation", "[thermo]") {
  std::mt19937_64 rng(55);
  ThermoModel mq = quadratic_test_model();
  QuadraticParams def;

  // stress-free reference: psi = 0 there by the model's calibration
  StateLocal ref;
  ref.p = Vec(2);
  ref.Fe = Tensor2::identity(2);
  ref.alpha = def.alpha0;
  ref.beta = def.beta0;
  ref.w = def.theta0;
  CHECK(std::abs(mq.free_energy(ref)) <= 1e-12);

  for (int t = 0; t < 30; ++t) {
    StateLocal q = random_state_local(rng, mq, 2);
    const auto tr = mq.triple(q);
    // e = psi + theta s
    const double psi = mq.free_energy(q);
    CHECK(std::abs(tr.e - (psi + tr.theta * tr.s)) <=
          1e-12 * (std::abs(tr.e) + tr.theta * std::abs(tr.s) + 1.0));
  }

  // gauge invariance of psi through change_gauge
  for (int t = 0; t < 20; ++t) {
    StateLocal q = random_state_local(rng, mq, 2);
    const double psi_theta = mq.free_energy(q);
    for (ThermalGauge g : kGauges) {
      StateLocal qg = mq.change_gauge(q, g);
      const double psi_g = mq.with_gauge(g).free_energy(qg);
      CHECK(std::abs(psi_g - psi_theta) <= 1e-9 * (std::abs(psi_theta) + 1.0));
    }
  }
}

TEST_CASE("gauge covariance of stresses and potentials", "[thermo]") {
  std::mt19937_64 rng(77);
  std::vector<ThermoModel> models = {quadratic_test_model(), mantle_energy(),
                                     sma_energy(default_sma_params(2))};
  for (const ThermoModel& m : models) {
    for (int t = 0; t < 25; ++t) {
      StateLocal q = random_state_local(rng, m, 2);
      const double theta0 = m.temperature(q);
      const Tensor2 sig0 = m.cauchy_stress(q);
      const Tensor2 man0 = m.mandel_stress(q);
      const auto [mua0, mub0] = m.chemical_potentials(q);
      const double psi0 = m.free_energy(q);
      const double sig_scale = max_abs(sig0) + std::abs(psi0) + 1e-300;
      for (ThermalGauge g : kGauges) {
        ThermoModel mg = m.with_gauge(g);
        StateLocal qg = m.change_gauge(q, g);
        CHECK(std::abs(mg.temperature(qg) - theta0) <= 1e-9 * theta0);
        CHECK(max_abs(mg.cauchy_stress(qg) - sig0) <= 1e-9 * sig_scale);
        CHECK(max_abs(mg.mandel_stress(qg) - man0) <= 1e-9 * sig_scale);
        const auto [mua, mub] = mg.chemical_potentials(qg);
        CHECK(std::abs(mua - mua0) <= 1e-9 * (std::abs(mua0) + sig_scale));
        CHECK(std::abs(mub - mub0) <= 1e-9 * (std::abs(mub0) + sig_scale));
        CHECK(std::abs(mg.free_energy(qg) - psi0) <= 1e-9 * sig_scale);
      }
    }
  }
}

TEST_CASE("cauchy stress at the stress-free reference", "[thermo]") {
  ThermoModel mq = quadratic_test_model();
  QuadraticParams def;
  StateLocal ref;
  ref.p = Vec(3);
  ref.Fe = Tensor2::identity(3);
  ref.alpha = def.alpha0;
  ref.beta = def.beta0;
  ref.w = def.theta0;
  CHECK(max_abs(mq.cauchy_stress(ref)) <= 1e-12);
  CHECK(max_abs(mq.mandel_stress(ref)) <= 1e-12);
}

TEST_CASE("mandel stress identities", "[thermo]") {
  std::mt19937_64 rng(31);
  ThermoModel mq = quadratic_test_model();
  for (int t = 0; t < 20; ++t) {
    StateLocal q = random_state_local(rng, mq, 2);
    const Tensor2 man = mq.mandel_stress(q);
    // Sigma_Mandel = Fe^T (Sigma_Cauchy - psi I) Fe^{-T}
    Tensor2 inner = mq.cauchy_stress(q);
    const double psi = mq.free_energy(q);
    for (int i = 0; i < 2; ++i) inner(i, i) -= psi;
    const Tensor2 rhs = matmul(transpose(q.Fe), matmul(inner, transpose(inv(q.Fe))));
    CHECK(max_abs(man - rhs) <= 1e-10 * (max_abs(man) + 1.0));

    // FD of the free energy at fixed temperature
    Tensor2 fd(2);
    const double h = 1e-6;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        StateLocal qp = q, qm = q;
        const double step = h * (1.0 + std::abs(q.Fe(i, j)));
        qp.Fe(i, j) += step;
        qm.Fe(i, j) -= step;
        fd(i, j) = (mq.free_energy(qp) - mq.free_energy(qm)) / (2 * step);
      }
    const Tensor2 man_fd = matmul(transpose(q.Fe), fd);
    CHECK(max_abs(man - man_fd) <= 1e-6 * (max_abs(man) + 1.0));
  }
}

TEST_CASE("chemical potentials", "[thermo]") {
  std::mt19937_64 rng(13);
  // model independent of alpha
  QuadraticParams p;
  p.a_alpha = 0.0;
  ThermoModel m0 = quadratic_test_model(p);
  StateLocal q = random_state_local(rng, m0, 2);
  CHECK(m0.chemical_potentials(q).first == 0.0);

  // gauge theta: mu equals psi'_zeta at fixed theta
  ThermoModel mq = quadratic_test_model();
  for (int t = 0; t < 20; ++t) {
    StateLocal qt = random_state_local(rng, mq, 2);
    const auto [mua, mub] = mq.chemical_potentials(qt);
    const ThetaPack pk = mq.core().eval(qt.Fe, qt.alpha, qt.beta, qt.w);
    CHECK(std::abs(mua - pk.psi_a) <= 1e-10 * (std::abs(pk.psi_a) + 1.0));
    CHECK(std::abs(mub - pk.psi_b) <= 1e-10 * (std::abs(pk.psi_b) + 1.0));
  }

  // gauge s: mu = E'_zeta exactly since S'_zeta = 0
  ThermoModel ms = mq.with_gauge(ThermalGauge::Entropy);
  StateLocal qs = random_state_local(rng, ms, 2);
  const ThermoEval te = ms.eval(qs);
  const auto [mua, mub] = ms.chemical_potentials(qs);
  CHECK(mua == te.E_a);
  CHECK(mub == te.E_b);
}

TEST_CASE("heat capacity", "[thermo]") {
  std::mt19937_64 rng(17);
  QuadraticParams def;
  ThermoModel mq = quadratic_test_model();
  for (int t = 0; t < 10; ++t) {
    StateLocal q = random_state_local(rng, mq, 2);
    CHECK(mq.heat_capacity(q) == Catch::Approx(def.c0).epsilon(1e-14));
  }

  // mantle: c independent of z, and equals the configured c at J = 1
  ThermoModel mm = mantle_energy();
  MantleParams mp;
  StateLocal q;
  q.p = Vec(2);
  q.Fe = Tensor2::identity(2);
  q.alpha = 0.3;
  q.beta = 0.0;
  q.w = mp.theta_ref;
  const double c1 = mm.heat_capacity(q);
  CHECK(c1 == Catch::Approx(mp.c).epsilon(1e-12));
  StateLocal q2 = q;
  q2.alpha = 0.8;
  CHECK(std::abs(mm.heat_capacity(q2) - c1) <= 1e-12 * c1);

  // FD cross-check through the core pack
  for (int t = 0; t < 10; ++t) {
    StateLocal qr = random_state_local(rng, mm, 2);
    const double th = qr.w;
    const double h = 1e-5 * th;
    const ThetaPack pp = mm.core().eval(qr.Fe, qr.alpha, qr.beta, th + h);
    const ThetaPack pm = mm.core().eval(qr.Fe, qr.alpha, qr.beta, th - h);
    const double c_fd = -th * (pp.psi_th - pm.psi_th) / (2 * h);
    CHECK(std::abs(mm.heat_capacity(qr) - c_fd) <= 1e-6 * c_fd);
  }
}

TEST_CASE("gauge conversion round trips", "[thermo]") {
  std::mt19937_64 rng(23);
  ThermoModel mq = quadratic_test_model();
  for (int t = 0; t < 20; ++t) {
    StateLocal q = random_state_local(rng, mq, 2);
    CHECK(mq.change_gauge(q, ThermalGauge::Temperature).w == q.w);
    StateLocal qe = mq.change_gauge(q, ThermalGauge::InternalEnergy);
    StateLocal back = mq.with_gauge(ThermalGauge::InternalEnergy)
                          .change_gauge(qe, ThermalGauge::Temperature);
    CHECK(std::abs(back.w - q.w) <= 1e-9 * std::abs(q.w));
    // the (theta, e, s) triple is preserved
    const auto t0 = mq.triple(q);
    const auto t1 = mq.with_gauge(ThermalGauge::InternalEnergy).triple(qe);
    CHECK(std::abs(t0.s - t1.s) <= 1e-10 * (std::abs(t0.s) + 1.0));
  }

  // Newton-based inversion against the toy model's analytic inverse
  const double c = 3.0, e0 = 2.0;
  ThermoModel toy_theta(std::make_shared<ToyLogCore>(c, e0), ThermalGauge::Temperature);
  StateLocal q;
  q.p = Vec(1);
  q.Fe = Tensor2::identity(1);
  q.w = 4.0;
  StateLocal qe = toy_theta.change_gauge(q, ThermalGauge::InternalEnergy);
  CHECK(qe.w == Catch::Approx(c * q.w).epsilon(1e-12));  // e = c theta
  ThermoModel toy_e = toy_theta.with_gauge(ThermalGauge::InternalEnergy);
  CHECK(toy_e.theta_of(qe) == Catch::Approx(q.w).epsilon(1e-9));

  // out-of-range w must fail the bracketing
  StateLocal qbad = qe;
  qbad.w = -50.0;
  CHECK_THROWS_AS(toy_e.eval(qbad), RootFindFailure);
}

TEST_CASE("derivative audit", "[thermo]") {
  std::mt19937_64 rng(41);
  ThermoModel mq = quadratic_test_model();
  for (int t = 0; t < 5; ++t) {
    StateLocal q = random_state_local(rng, mq, 2);
    DerivReport rep = mq.check_derivatives(q, 1e-5);
    CHECK(rep.worst_rel() <= 1e-8);
  }

  ThermoModel mm = mantle_energy();
  for (int t = 0; t < 5; ++t) {
    StateLocal q = random_state_local(rng, mm, 2);
    DerivReport rep = mm.check_derivatives(q, 1e-5);
    CHECK(rep.worst_rel_unflagged() <= 1e-6);
  }
}

TEST_CASE("fixed-theta free energy slope matches driving force", "[thermo]") {
  // psi'_Fe at fixed theta = E'_Fe - Theta S'_Fe, by FD of psi
  std::mt19937_64 rng(59);
  for (ThermoModel m : {quadratic_test_model(), mantle_energy()}) {
    for (int t = 0; t < 10; ++t) {
      StateLocal q = random_state_local(rng, m, 2);
      const ThermoEval te = m.eval(q);
      const Tensor2 force = te.E_Fe - te.theta * te.S_Fe;
      Tensor2 fd(2);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          const double step = 1e-6 * (1.0 + std::abs(q.Fe(i, j)));
          Tensor2 fp = q.Fe, fm = q.Fe;
          fp(i, j) += step;
          fm(i, j) -= step;
          const ThetaPack pp = m.core().eval(fp, q.alpha, q.beta, te.theta);
          const ThetaPack pm = m.core().eval(fm, q.alpha, q.beta, te.theta);
          fd(i, j) = (pp.psi - pm.psi) / (2 * step);
        }
      const double scale = max_abs(force) + max_abs(fd) + 1e-300;
      CHECK(max_abs(force - fd) <= 2e-6 * scale);
    }
  }
}

TEST_CASE("referential-actual stress identity", "[thermo]") {
  std::mt19937_64 rng(61);
  for (ThermoModel m : {mantle_energy(), sma_energy(default_sma_params(2))}) {
    REQUIRE(m.core().has_referential());
    for (int t = 0; t < 10; ++t) {
      StateLocal q = random_state_local(rng, m, 2);
      const double J = det(q.Fe);
      const ThermoEval te = m.eval(q);
      // LHS: psi'_Fe Fe^T + psi I from the actual pack
      const ThetaPack pk = m.core().eval(q.Fe, q.alpha, q.beta, te.theta);
      Tensor2 lhs = matmul(pk.psi_Fe, transpose(q.Fe));
      for (int i = 0; i < 2; ++i) lhs(i, i) += pk.psi;
      // RHS: psihat'_Fe Fe^T / J, with psihat'_Fe reconstructed via the
      // product rule psihat'_Fe = J psi'_Fe + psihat Fe^{-T}
      const double psihat = m.core().referential_psi(q.Fe, q.alpha, q.beta, te.theta);
      Tensor2 ref_dFe = J * pk.psi_Fe + psihat * transpose(inv(q.Fe));
      Tensor2 rhs = matmul(ref_dFe, transpose(q.Fe));
      rhs *= 1.0 / J;
      CHECK(max_abs(lhs - rhs) <= 1e-9 * (max_abs(lhs) + max_abs(rhs) + 1e-300));

      // and psihat'_Fe itself against central differences of psihat
      Tensor2 fd(2);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          const double step = 1e-6 * (1.0 + std::abs(q.Fe(i, j)));
          Tensor2 fp = q.Fe, fm = q.Fe;
          fp(i, j) += step;
          fm(i, j) -= step;
          fd(i, j) = (m.core().referential_psi(fp, q.alpha, q.beta, te.theta) -
                      m.core().referential_psi(fm, q.alpha, q.beta, te.theta)) /
                     (2 * step);
        }
      CHECK(max_abs(ref_dFe - fd) <= 5e-6 * (max_abs(ref_dFe) + max_abs(fd) + 1e-300));
    }
  }
}

TEST_CASE("nonpositive heat capacity is rejected", "[thermo]") {
  // psi with psi''_thth = 0 has zero heat capacity: inadmissible
  class ZeroCCore final : public ThermoCore {
   public:
    std::string name() const override { return "zeroc"; }
    ThetaPack eval(const Tensor2& Fe, double, double, double th) const override {
      ThetaPack pk;
      pk.psi_Fe = Tensor2(Fe.dim());
      pk.psi_Fe_th = Tensor2(Fe.dim());
      pk.psi = -th;
      pk.psi_th = -1.0;
      pk.psi_th_th = 0.0;
      return pk;
    }
    AdmissibleBox box() const override { return {}; }
    double rho_ref() const override { return 1.0; }
  };
  ThermoModel bad(std::make_shared<ZeroCCore>(), ThermalGauge::Temperature);
  StateLocal q;
  q.p = Vec(1);
  q.Fe = Tensor2::identity(1);
  q.w = 1.0;
  CHECK_THROWS_AS(bad.heat_capacity(q), NonpositiveHeatCapacity);
}

TEST_CASE("pointwise constitutive layer supports d = 3", "[thermo]") {
  std::mt19937_64 rng(97);
  std::vector<ThermoModel> models = {quadratic_test_model(), mantle_energy(),
                                     sma_energy(default_sma_params(3))};
  for (const ThermoModel& m : models) {
    for (int t = 0; t < 10; ++t) {
      StateLocal q = random_state_local(rng, m, 3);
      const double th0 = m.temperature(q);
      CHECK(th0 > 0);
      const Tensor2 sig0 = m.cauchy_stress(q);
      const double scale = max_abs(sig0) + std::abs(m.free_energy(q)) + th0;
      for (ThermalGauge g : {ThermalGauge::InternalEnergy, ThermalGauge::Entropy}) {
        ThermoModel mg = m.with_gauge(g);
        StateLocal qg = m.change_gauge(q, g);
        CHECK(std::abs(mg.temperature(qg) - th0) <= 1e-9 * th0);
        CHECK(max_abs(mg.cauchy_stress(qg) - sig0) <= 1e-9 * scale);
      }
      DerivReport rep = m.check_derivatives(q, 1e-5);
      if (m.core().name() != "sma")  // hard-min kinks excluded elsewhere
        CHECK(rep.worst_rel_unflagged() <= 1e-5);
    }
  }
}
