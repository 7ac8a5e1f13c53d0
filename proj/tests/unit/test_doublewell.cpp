#include "common.hpp"
#include "fpmass/doublewell.hpp"
#include "fpmass/errors.hpp"
#include "fpmass/observables.hpp"

using namespace fpmass;

TEST_SUITE("doublewell") {
  TEST_CASE("symmetric quartic constants") {
    const auto q = make_symmetric_quartic();
    CHECK(q.h_minus() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(q.h_plus() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rel(q.params().omega_plus, std::sqrt(4 / kPi)) < 1e-14);
    CHECK(rel(q.params().omega_minus, std::sqrt(4 / kPi)) < 1e-14);
    CHECK(rel(q.params().omega0, std::sqrt(2 / kPi)) < 1e-14);
    CHECK(q.d2(1.0) == doctest::Approx(8.0));
    CHECK(q.d2(0.0) == doctest::Approx(-4.0));
    for (double nu : {0.3, 0.5}) {
      const auto s = dw_scalars(q, nu);
      CHECK(rel(s.tau, std::sqrt(8.0) / kPi * std::exp(-1 / (nu * nu))) < 1e-12);
      CHECK(std::abs(s.kappa - 1.0) <= 1e-10);
    }
    CHECK(detect_mode(q) == DwMode::EqualBarriers);
  }

  TEST_CASE("blended family") {
    const auto b = make_blended(1.0, 2.0, 0.5, 1.0, 1.2);
    CHECK(b(0.0) == 0.0);
    CHECK(b(b.p_minus()) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(b(b.p_plus()) == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(std::abs(b.d1(b.p_minus())) < 1e-12);
    CHECK(std::abs(b.d1(b.p_plus())) < 1e-12);
    CHECK(rel(b.d2(0.0), -2 * kPi * 0.25) < 1e-12);
    CHECK(rel(b.d2(b.p_minus()), 2 * kPi * 1.0) < 1e-10);
    CHECK(rel(b.d2(b.p_plus()), 2 * kPi * 1.44) < 1e-10);
    // derivatives are consistent with H
    for (double p : {-2.3, -0.7, 0.2, 1.1, 3.0}) {
      const double e = 1e-5;
      CHECK(std::abs((b(p + e) - b(p - e)) / (2 * e) - b.d1(p)) < 1e-7);
      CHECK(std::abs((b.d1(p + e) - b.d1(p - e)) / (2 * e) - b.d2(p)) < 1e-6);
    }
    CHECK(detect_mode(b) == DwMode::Generic);
    CHECK_THROWS_AS(make_blended(1.0, 2.0, 1.0, 1.0, 1.2), ConfigError);
    // deeper well given first: mirrored
    const auto m = make_blended(2.0, 1.0, 0.5, 1.2, 1.0);
    CHECK(m.h_minus() == doctest::Approx(1.0));
    CHECK(m.h_plus() == doctest::Approx(2.0));
    CHECK(rel(m.d2(m.p_minus()), 2 * kPi * 1.0) < 1e-10);
    CHECK(rel(m.d2(m.p_plus()), 2 * kPi * 1.44) < 1e-10);
    CHECK_THROWS_AS(make_blended(-1.0, 1.0, 0.5, 1.0, 1.2), ConfigError);
  }

  TEST_CASE("Laplace corrections of the scalars") {
    // eta omega0 / nu - 1, mu- omega- e^{-h-/nu^2} / nu - 1, kappa (omega-/omega+) e^{(h+ - h-)/nu^2} - 1, theta
    struct Row {
      double nu, eta, mu, kappa, theta;
    };
    auto corrections = [](const DoubleWellPotential& pot, double nu) {
      const auto s = dw_scalars(pot, nu);
      const auto& q = pot.params();
      const double nu2 = nu * nu;
      return Row{nu, std::expm1(s.log_eta + std::log(q.omega0 / nu)),
                 std::expm1(s.log_mu_minus + std::log(q.omega_minus / nu) - q.h_minus / nu2),
                 std::expm1(std::log(s.kappa) + std::log(q.omega_minus / q.omega_plus) + (q.h_plus - q.h_minus) / nu2),
                 s.theta};
    };
    // independent quadrature of the same integrals
    const std::vector<Row> blended_oracle{
        {0.05, -1.660968259985518e-04, 6.964319020434928e-04, 3.227922083544055e-04, 5.302194009162431e-04},
        {0.1, -6.440081301517520e-04, 2.810083060181601e-03, 1.307140680592900e-03, 2.164265213692396e-03},
        {0.25, -3.123300255374661e-03, 1.879661185875037e-02, 9.004286313874843e-03, 1.561460414075699e-02},
        {0.4, -3.488136959164945e-03, 5.790816275254729e-02, 3.034401663490027e-02, 5.421803419064775e-02},
        {0.5, -1.605184424948725e-04, 1.048775242066426e-01, 5.648650640166486e-02, 1.047001709873094e-01}};
    const std::vector<Row> quartic_oracle{
        {0.05, 4.700383980971168e-04, 4.700383981006695e-04, 0.0, 9.402977322934269e-04},
        {0.1, 1.895944221819379e-03, 1.895944221820267e-03, 0.0, 3.795483048132153e-03},
        {0.3, 1.899330678671673e-02, 1.899415669824123e-02, 0.0, 3.834822533028270e-02},
        {0.4, 3.862392092750566e-02, 3.876538141276553e-02, 0.0, 7.888657336668237e-02},
        {0.5, 6.790700511776659e-02, 6.952046452110761e-02, 0.0, 1.421483961788987e-01}};
    const auto b = make_blended(1.0, 2.0, 0.5, 1.0, 1.2);
    const auto qq = make_symmetric_quartic();
    for (const auto& [pot, oracle] : {std::pair{b, blended_oracle}, std::pair{qq, quartic_oracle}}) {
      for (const auto& o : oracle) {
        const Row r = corrections(pot, o.nu);
        CHECK(std::abs(r.eta - o.eta) <= 1e-9);
        CHECK(std::abs(r.mu - o.mu) <= 1e-9);
        CHECK(std::abs(r.kappa - o.kappa) <= 1e-9);
        CHECK(std::abs(r.theta - o.theta) <= 1e-9);
      }
    }

    // second order as nu -> 0
    std::vector<double> small{0.05, 0.1}, e_eta, e_mu, e_kappa, e_theta, q_theta;
    for (double nu : small) {
      const Row r = corrections(b, nu);
      e_eta.push_back(std::abs(r.eta));
      e_mu.push_back(std::abs(r.mu));
      e_kappa.push_back(std::abs(r.kappa));
      e_theta.push_back(std::abs(r.theta));
      q_theta.push_back(std::abs(corrections(qq, nu).theta));
    }
    CHECK(loglog_slope(small, e_eta) == doctest::Approx(2.0).epsilon(0.15));
    CHECK(loglog_slope(small, e_mu) == doctest::Approx(2.0).epsilon(0.15));
    CHECK(loglog_slope(small, e_kappa) == doctest::Approx(2.0).epsilon(0.15));
    CHECK(loglog_slope(small, e_theta) == doctest::Approx(2.0).epsilon(0.15));
    CHECK(loglog_slope(small, q_theta) == doctest::Approx(2.0).epsilon(0.15));
  }

  TEST_CASE("quartic theta slope over nu in {0.3, 0.4, 0.5}") {
    const auto qq = make_symmetric_quartic();
    std::vector<double> nq{0.3, 0.4, 0.5}, tq;
    for (double nu : nq) tq.push_back(std::abs(dw_scalars(qq, nu).theta));
    CHECK(tq[0] < tq[1]);
    CHECK(tq[1] < tq[2]);
    CHECK(std::abs(loglog_slope(nq, tq) - 2.0) <= 0.3);
  }

  TEST_CASE("global Gibbs state") {
    for (const auto& pot : {make_symmetric_quartic(), make_blended(1.0, 1.3, 0.5, 1.0, 1.5)}) {
      DoubleWellSystem sys(pot, 0.4);
      const auto g = dw_equilibrium(sys.potential(), sys.scalars(), sys.grid());
      CHECK(std::abs(g.total_mass() - 1.0) <= 1e-10);
      const auto m = dw_substitute_masses(g, sys.scalars(), sys.potential(), sys.psi());
      CHECK(std::abs(m.m_minus / m.m_plus - sys.scalars().kappa) <= 1e-9 * sys.scalars().kappa);
      const double mum = 1 / (1 + 1 / sys.scalars().kappa);
      CHECK(std::abs(m.mbar_minus - mum) <= 1e-9);
      CHECK(std::abs(m.m_minus - mum) <= 1e-9);
      CHECK(std::abs(m.mtilde_minus + m.mtilde_plus - 1.0) <= 1e-10);
      CHECK(std::abs(m.mbar_minus - sys.scalars().kappa * m.mbar_plus) <= 1e-9);
      // the energy lower bound is attained by the Gibbs state
      const auto r = sys(0.0, g);
      CHECK(std::abs(r.E - sys.scalars().energy_floor()) <= 1e-8);
      CHECK(std::abs(r.D) <= 1e-12);

      const auto A = sys.generator();
      DensityField cur = g;
      for (int k = 0; k < 1000; ++k) cur = step(cur, 0.05, A, sys.scalars().tau);
      double err = 0;
      for (int i = 0; i < g.grid.n; ++i) err += std::abs(cur.values[i] - g.values[i]);
      CHECK(err * g.grid.h <= 1e-12);
    }
  }

  TEST_CASE("weight across the barrier") {
    DoubleWellSystem sys(make_symmetric_quartic(), 0.4);
    const auto& psi = sys.psi();
    CHECK(psi.value(-1.0) == 0.0);
    CHECK(std::abs(psi.value(1.0) - 1.0) <= 1e-12);
    CHECK(std::abs(psi.value(0.0) - 0.5) <= 1e-10);
    CHECK(psi.value(-3.0) == 0.0);
    CHECK(psi.value(2.0) == 1.0);
    CHECK(psi.derivative(1.5) == 0.0);
    const double p = 0.3;
    CHECK(rel(psi.derivative(p), std::exp(sys.potential()(p) / 0.16 - sys.scalars().log_eta)) < 1e-6);

    // left-well local equilibrium: transition-layer mass on the right scales like nu sqrt(tau)
    std::vector<double> c;
    for (double nu : {0.3, 0.4, 0.5}) {
      DoubleWellSystem s(make_symmetric_quartic(), nu);
      const auto gl = dw_local_gibbs(s.potential(), s.scalars(), s.grid(), -1);
      const auto m = dw_substitute_masses(gl, s.scalars(), s.potential(), s.psi());
      CHECK(std::abs(m.mtilde_minus + m.mtilde_plus - gl.total_mass()) <= 1e-12);
      c.push_back(m.mtilde_plus / (nu * std::sqrt(s.scalars().tau)));
    }
    CHECK(*std::max_element(c.begin(), c.end()) <= 1.0);
  }

  TEST_CASE("effective rate balance") {
    DoubleWellSystem sys(make_symmetric_quartic(), 0.4);
    const auto g = dw_equilibrium(sys.potential(), sys.scalars(), sys.grid());
    std::vector<DwRecord> rec;
    for (int k = 0; k < 5; ++k) rec.push_back(sys(0.1 * k, g));
    const auto b = dw_effective_rate(rec, sys.scalars());
    for (std::size_t k = 0; k < b.t.size(); ++k) {
      CHECK(std::abs(b.lhs[k]) <= 1e-12);
      CHECK(std::abs(b.rhs[k]) <= 1e-9);
    }

    // relaxed left-well start
    auto rho = dw_local_gibbs(sys.potential(), sys.scalars(), sys.grid(), -1);
    auto run = [&](double cadence) {
      SolverConfig cfg;
      cfg.nu = 0.4;
      cfg.tau = sys.scalars().tau;
      std::vector<DwRecord> r;
      solve(rho, 1.0, sys.generator(), cfg, cadence, [&](double t, const DensityField& d) { r.push_back(sys(t, d)); });
      return dw_effective_rate(r, sys.scalars(), 0.1);
    };
    const auto fine = run(0.01);
    CHECK(fine.max_relative <= 0.02);
  }

  TEST_CASE("limit equations") {
    const std::vector<double> ts{0.0, 1.0, 50.0};
    const auto gen = dw_limit_ode(1.0, 0.0, ts, DwMode::Generic, 1.0);
    CHECK(std::abs(gen[1].m_minus - std::exp(-1.0)) < 1e-15);
    CHECK(std::abs(gen[1].m_plus - (1 - std::exp(-1.0))) < 1e-15);
    const auto sym = dw_limit_ode(1.0, 0.0, ts, DwMode::EqualBarriers, 1.0);
    CHECK(std::abs(sym[2].m_plus - 0.5) < 1e-12);
    const auto k2 = dw_limit_ode(1.0, 0.0, ts, DwMode::EqualBarriers, 2.0);
    CHECK(std::abs(k2[2].m_plus - 1.0 / 3.0) < 1e-12);
    CHECK(std::abs(k2[2].m_minus / k2[2].m_plus - 2.0) < 1e-10);
    // closed form satisfies the equation
    const double e = 1e-6, t = 0.4;
    const auto d = dw_limit_ode(0.7, 0.3, {t - e, t, t + e}, DwMode::EqualBarriers, 2.0);
    CHECK(std::abs((d[2].m_plus - d[0].m_plus) / (2 * e) - (d[1].m_minus - 2.0 * d[1].m_plus)) < 1e-8);

    CHECK_THROWS_AS(dw_limit_ode(make_symmetric_quartic(), 1, 0, ts, DwMode::Generic, 1.0), ModeError);
    CHECK_THROWS_AS(dw_limit_ode(make_blended(1.0, 2.0, 0.5, 1.0, 1.2), 1, 0, ts, DwMode::EqualBarriers, 1.0),
                    ModeError);
    CHECK_NOTHROW(dw_limit_ode(make_symmetric_quartic(), 1, 0, ts, DwMode::EqualBarriers, 1.0));
  }

  TEST_CASE("energy stays above the floor and dissipation is integrable") {
    DoubleWellSystem sys(make_blended(1.0, 1.3, 0.5, 1.0, 1.5), 0.4);
    const auto rho = dw_local_gibbs(sys.potential(), sys.scalars(), sys.grid(), -1);
    SolverConfig cfg;
    cfg.nu = 0.4;
    cfg.tau = sys.scalars().tau;
    std::vector<DwRecord> r;
    solve(rho, 3.0, sys.generator(), cfg, 0.01, [&](double t, const DensityField& d) { r.push_back(sys(t, d)); });
    double cum = 0;
    for (std::size_t k = 0; k < r.size(); ++k) {
      CHECK(r[k].E >= sys.scalars().energy_floor() - 1e-10);
      if (k) {
        CHECK(r[k].E <= r[k - 1].E + 1e-10);
        cum += 0.5 * (r[k].D + r[k - 1].D) * (r[k].t - r[k - 1].t);
      }
    }
    // tau dE/dt = -nu^4 D integrates to the energy drop
    const double drop = r.front().E - r.back().E;
    CHECK(std::isfinite(cum));
    CHECK(std::abs(std::pow(0.4, 4) * cum / sys.scalars().tau - drop) <= 0.05 * drop);
  }
}
