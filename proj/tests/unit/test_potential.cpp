#include <fstream>
#include <random>

#include "common.hpp"
#include "fpmass/potential.hpp"

using namespace fpmass;

TEST_SUITE("potential") {
  TEST_CASE("cosine critical points") {
    const auto pot = make_cosine();
    CHECK(pot.sigma_lo() == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(pot.sigma_hi() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pot.zeta() == doctest::Approx(1.0).epsilon(1e-9));

    auto cp = find_critical_points(pot, 0.0);
    CHECK(std::abs(cp.p_min0) < 1e-12);
    CHECK(std::abs(cp.p_max0 - kPi) < 1e-12);

    cp = find_critical_points(pot, 0.5);
    CHECK(std::abs(cp.p_min0 - std::asin(0.5)) < 1e-12);
    CHECK(std::abs(cp.p_max0 - (kPi - std::asin(0.5))) < 1e-12);
    CHECK(std::abs(pot.d1(cp.p_min0) - 0.5) < 1e-12);
    CHECK(std::abs(pot.d1(cp.p_max0) - 0.5) < 1e-12);
    CHECK(pot.d2(cp.p_min0) > 0);
    CHECK(pot.d2(cp.p_max0) < 0);
    CHECK(cp.p_min(3) == doctest::Approx(cp.p_min0 + 6 * kPi));

    CHECK_THROWS_AS(find_critical_points(pot, 1.0), RegimeError);
    CHECK_THROWS_AS(find_critical_points(pot, -1.0), RegimeError);
    CHECK_THROWS_AS(find_critical_points(pot, 3.0), RegimeError);
    CHECK(classify(pot, 1.25) == Regime::SupercriticalRight);
    CHECK(classify(pot, -1.25) == Regime::SupercriticalLeft);
    CHECK(classify(pot, 1.0) == Regime::Boundary);
  }

  TEST_CASE("cosine barriers and Kramers time") {
    const auto pot = make_cosine();
    auto kd = barriers(pot, 0.0, find_critical_points(pot, 0.0));
    CHECK(std::abs(kd.h_left - 2.0) < 1e-12);
    CHECK(std::abs(kd.h_right - 2.0) < 1e-12);
    CHECK(std::abs(kd.c_k - 1 / (2 * kPi)) < 1e-14);
    CHECK(rel(tau(kd, 0.5), std::exp(-8.0) / (2 * kPi)) < 1e-12);
    CHECK(tau(kd, 0.5) == doctest::Approx(5.3365e-5).epsilon(1e-4));

    kd = barriers(pot, 0.5, find_critical_points(pot, 0.5));
    const double P = std::asin(0.5), Q = kPi - P;
    const double hR = (-std::cos(Q) - 0.5 * Q) - (-std::cos(P) - 0.5 * P);
    CHECK(std::abs(kd.h_right - hR) < 1e-12);
    CHECK(std::abs(kd.h_right - (std::sqrt(3.0) - kPi / 3)) < 1e-12);
    CHECK(std::abs(kd.h_left - (std::sqrt(3.0) + 2 * kPi / 3)) < 1e-12);
    CHECK(std::abs(kd.h_left - kd.h_right - kPi) < 1e-10);
    CHECK(std::abs(kd.c_k - std::cos(P) / (2 * kPi)) < 1e-14);
    CHECK(tau(kd, 0.5) == doctest::Approx(8.90e-3).epsilon(2e-3));
  }

  TEST_CASE("tau is increasing in nu and refuses to underflow") {
    const auto pot = make_cosine();
    const auto kd = barriers(pot, 0.0, find_critical_points(pot, 0.0));
    double prev = 0;
    for (double nu = 0.1; nu < 2; nu += 0.1) {
      const double t = tau(kd, nu);
      CHECK(t > prev);
      prev = t;
    }
    CHECK_THROWS_AS(tau(kd, 0.05), ScaleError);  // 2 / 0.0025 = 800 > 700
    KramersData flat{1e-12, 1e-12, 0.3};
    CHECK(rel(tau(flat, 1.0), 0.3) < 1e-11);
  }

  TEST_CASE("periodicity of evaluators") {
    std::vector<PeriodicPotential> pots{make_cosine(1.3, 4.0), make_g_of_sin({0.0, 1.0, 0.2, -0.05})};
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-50, 50);
    for (const auto& pot : pots) {
      const double L = pot.period();
      for (int k = 0; k < 1000; ++k) {
        const double p = U(rng);
        CHECK(std::abs(pot(p + L) - pot(p)) <= 1e-12 * std::max(1.0, std::abs(pot(p))));
        CHECK(std::abs(pot.d1(p + L) - pot.d1(p)) <= 1e-12 * std::max(1.0, std::abs(pot.d1(p))));
        CHECK(std::abs(pot.d2(p + L) - pot.d2(p)) <= 1e-12 * std::max(1.0, std::abs(pot.d2(p))));
        CHECK(std::abs(pot.d3(p + L) - pot.d3(p)) <= 1e-12 * std::max(1.0, std::abs(pot.d3(p))));
      }
    }
  }

  TEST_CASE("non-degeneracy: flat H' only at the extremes") {
    const auto pot = make_g_of_sin({0.0, 1.0, 0.2, -0.05});
    for (int k = 0; k < 4000; ++k) {
      const double p = pot.period() * k / 4000.0;
      if (std::abs(pot.d2(p)) < 1e-3)
        CHECK(std::min(std::abs(pot.d1(p) - pot.sigma_lo()), std::abs(pot.d1(p) - pot.sigma_hi())) < 1e-3);
    }
  }

  TEST_CASE("barrier difference equals sigma L for random landscapes") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> g2(-0.2, 0.2), g3(-0.05, 0.05), amp(0.5, 2.0), frac(0.05, 0.95);
    for (int k = 0; k < 100; ++k) {
      const double a = amp(rng);
      const auto pot = make_g_of_sin({0.0, a, a * g2(rng), a * g3(rng)});
      const double s = pot.sigma_lo() + frac(rng) * (pot.sigma_hi() - pot.sigma_lo());
      const auto cp = find_critical_points(pot, s);
      const auto kd = barriers(pot, s, cp);
      CHECK(std::abs(kd.h_left - kd.h_right - s * pot.period()) < 1e-9);
      CHECK(kd.h_left > 0);
      CHECK(kd.h_right > 0);
      CHECK(kd.c_k > 0);
      CHECK(std::abs(pot.d1(cp.p_min0) - s) < 1e-12 * std::max(1.0, pot.sigma_hi()));
      CHECK(std::abs(pot.d1(cp.p_max0) - s) < 1e-12 * std::max(1.0, pot.sigma_hi()));
    }
  }

  TEST_CASE("translation and constant shifts") {
    const double delta = 0.7;
    const auto base = make_cosine();
    PotentialFunctions f{[=](double p) { return -std::cos(p - delta) + 5.0; },
                         [=](double p) { return std::sin(p - delta); },
                         [=](double p) { return std::cos(p - delta); },
                         [=](double p) { return -std::sin(p - delta); }};
    const auto shifted = make_custom(f, 2 * kPi);
    for (double s : {0.0, 0.3, -0.6}) {
      const auto a = find_critical_points(base, s), b = find_critical_points(shifted, s);
      const double L = 2 * kPi;
      auto mod = [&](double x) { return x - L * std::floor(x / L); };
      CHECK(std::abs(mod(b.p_min0 - a.p_min0 - delta + 0.5 * L) - 0.5 * L) < 1e-11);
      CHECK(std::abs(mod(b.p_max0 - a.p_max0 - delta + 0.5 * L) - 0.5 * L) < 1e-11);
      const auto ka = barriers(base, s, a), kb = barriers(shifted, s, b);
      CHECK(rel(kb.c_k, ka.c_k) < 1e-12);
      CHECK(rel(tau(kb, 0.5), tau(ka, 0.5)) < 1e-10);
    }
  }

  TEST_CASE("bimodal derivative is rejected") {
    PotentialFunctions f{[](double p) { return -std::cos(2 * p); }, [](double p) { return 2 * std::sin(2 * p); },
                         [](double p) { return 4 * std::cos(2 * p); }, [](double p) { return -8 * std::sin(2 * p); }};
    CHECK_THROWS_AS(make_custom(f, 2 * kPi), DegenerateError);
    CHECK_THROWS_AS(make_g_of_sin({0.0, 1.0, 2.0}), ConfigError);  // G' changes sign on [-1, 1]
  }

  TEST_CASE("tabulated potential reproduces the cosine") {
    const int N = 128;
    const double L = 2 * kPi;
    std::vector<double> p(N), h(N);
    for (int k = 0; k < N; ++k) {
      p[k] = k * L / N;
      h[k] = -std::cos(p[k]);
    }
    const auto pot = make_tabulated(p, h, L);
    for (int k = 0; k < 100; ++k) {
      const double x = 0.123 + 0.37 * k;
      CHECK(std::abs(pot(x) + std::cos(x)) < 1e-9);
      CHECK(std::abs(pot.d1(x) - std::sin(x)) < 1e-7);
      CHECK(std::abs(pot.d2(x) - std::cos(x)) < 1e-5);
      CHECK(std::abs(pot.d3(x) + std::sin(x)) < 1e-3);
    }
    const auto kd = barriers(pot, 0.5, find_critical_points(pot, 0.5));
    CHECK(std::abs(kd.h_right - 0.6848532563722795) < 1e-8);

    const char* file = "tab_cosine_test.csv";
    {
      std::ofstream out(file);
      out.precision(17);
      out << "p,H\n";
      for (int k = 0; k < N; ++k) out << p[k] << "," << h[k] << "\n";
    }
    const auto loaded = load_tabulated_csv(file, L);
    CHECK(std::abs(loaded(1.0) + std::cos(1.0)) < 1e-8);
    std::remove(file);
  }
}
