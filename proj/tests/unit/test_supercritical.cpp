#include "common.hpp"
#include "fpmass/errors.hpp"
#include "fpmass/supercritical.hpp"

using namespace fpmass;

namespace {
PeriodicPotential shifted_cosine(double dp, double c) {
  return make_custom({[=](double p) { return c - std::cos(p - dp); }, [=](double p) { return std::sin(p - dp); },
                      [=](double p) { return std::cos(p - dp); }, [=](double p) { return -std::sin(p - dp); }},
                     2 * kPi);
}
}  // namespace

TEST_SUITE("supercritical") {
  TEST_CASE("effective velocity") {
    const auto pot = make_cosine();
    for (double s : {1.25, 5.0}) {
      CHECK(std::abs(effective_velocity(pot, s) - std::sqrt(s * s - 1)) <= 1e-9 * std::sqrt(s * s - 1));
      const double I = simpson([&](double p) { return 1 / (s - std::sin(p)); }, 0, 2 * kPi, 4000);
      CHECK(rel(effective_velocity(pot, s), 2 * kPi / I) < 1e-9);
    }
    CHECK(std::abs(effective_velocity(pot, 1.25) - 0.75) < 1e-12);
    CHECK(std::abs(effective_velocity(pot, 100.0) / 100.0 - 1) <= 1e-3);
    CHECK(effective_velocity(pot, 1.25, VelocitySign::AsPrinted) == doctest::Approx(-0.75));
    CHECK(effective_velocity(pot, -1.25) == doctest::Approx(-0.75));
    CHECK_THROWS_AS(effective_velocity(pot, 1.0), SingularIntegralError);
    CHECK_THROWS_AS(effective_velocity(pot, 0.5), RegimeError);
    CHECK_THROWS_AS(BallisticWeight(pot, 0.5, 0.1), RegimeError);

    for (double dp : {0.0, 0.7, 2.0})
      for (double c : {0.0, 3.0}) CHECK(rel(effective_velocity(shifted_cosine(dp, c), 1.25), 0.75) < 1e-10);
  }

  TEST_CASE("deterministic traversal time") {
    // dp/dt = sigma - H'(p) from 0 to L by RK4
    const double s = 1.25, L = 2 * kPi;
    auto f = [&](double p) { return s - std::sin(p); };
    double p = 0, t = 0;
    const double dt = 1e-4;
    while (true) {
      const double k1 = f(p), k2 = f(p + 0.5 * dt * k1), k3 = f(p + 0.5 * dt * k2), k4 = f(p + dt * k3);
      const double next = p + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
      if (next >= L) {
        t += dt * (L - p) / (next - p);
        break;
      }
      p = next;
      t += dt;
    }
    CHECK(std::abs(t - L / effective_velocity(make_cosine(), s)) < 1e-6);
  }

  TEST_CASE("periodic corrector") {
    const auto pot = make_cosine();
    for (double nu : {0.5, 0.2, 0.1, 0.05}) {
      BallisticWeight w(pot, 1.25, nu);
      CHECK(w.periodicity_residual() <= 1e-9);
      CHECK(w.c() > 0);
      for (double p = 0; p < 2 * kPi; p += 0.3) CHECK(w.dpsi(p) > 0);
    }
    // nu^2 psi'' = (H' - sigma) psi' + 1 at interior points
    BallisticWeight w(pot, 1.25, 0.3);
    for (double p : {0.4, 2.0, 4.5}) {
      const double e = 1e-4;
      const double d2 = (w.dpsi(p + e) - w.dpsi(p - e)) / (2 * e);
      CHECK(std::abs(0.09 * d2 - ((std::sin(p) - 1.25) * w.dpsi(p) + 1)) < 1e-6);
    }

    // expansion u0 + nu^2 u1 leaves an O(nu^4) remainder
    std::vector<double> nus{0.2, 0.1, 0.05}, err;
    for (double nu : nus) {
      BallisticWeight b(pot, 1.25, nu);
      double sup = 0;
      for (int k = 0; k < 64; ++k) {
        const double p = 2 * kPi * k / 64;
        sup = std::max(sup, std::abs(b.dpsi(p) - b.u0(p) - nu * nu * b.u1(p)));
      }
      err.push_back(sup);
    }
    CHECK(loglog_slope(nus, err) == doctest::Approx(4.0).epsilon(0.15));
    CHECK(err.back() / std::pow(0.05, 4) <= 2 * err[1] / std::pow(0.1, 4));

    // mean slope tends to 1 / lambda
    std::vector<double> gap;
    for (double nu : nus) gap.push_back(std::abs(BallisticWeight(pot, 1.25, nu).mean_slope() * 0.75 - 1));
    CHECK(gap[1] < gap[0]);
    CHECK(gap[2] < gap[1]);
    CHECK(gap[2] < 1e-3);

    // psi stays within a bounded distance of its mean linear growth
    BallisticWeight b(pot, 1.25, 0.1);
    const double m = b.mean_slope();
    double psi = 0, dev = 0, first = 0;
    const int n = 2000;
    const double h = 10 * 2 * kPi / n;
    for (int k = 0; k < n; ++k) {
      const double a = k * h;
      psi += h / 6 * (b.dpsi(a) + 4 * b.dpsi(a + h / 2) + b.dpsi(a + h));
      dev = std::max(dev, std::abs(psi - m * (a + h)));
      if (k + 1 == n / 10) first = dev;
    }
    // no drift beyond the first period
    CHECK(dev <= first + 1e-6);
    CHECK(std::isfinite(dev));
  }

  TEST_CASE("ballistic transport in the PDE") {
    const auto pot = make_cosine();
    const auto r = ballistic_check(pot, 1.25, 0.1, 20.0);
    CHECK(std::abs(r.slope - 0.75) / 0.75 <= 0.02);
    const auto q = ballistic_check(pot, 5.0, 0.1, 20.0);
    CHECK(std::abs(q.slope - std::sqrt(24.0)) / std::sqrt(24.0) <= 0.02);
    CHECK(q.lambda == doctest::Approx(std::sqrt(24.0)).epsilon(1e-9));
    CHECK(q.t.size() == q.P.size());
  }
}
