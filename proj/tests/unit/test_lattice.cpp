#include "common.hpp"
#include "fpmass/errors.hpp"
#include "fpmass/lattice.hpp"

using namespace fpmass;

namespace {
LatticeMassState point(int radius, Direction dir, double kappa = 1.0) {
  LatticeMassState s;
  s.j_min = dir == Direction::Right ? 0 : -radius;
  s.m.assign(dir == Direction::Symmetric ? 2 * radius + 1 : radius + 1, 0.0);
  if (dir == Direction::Left) s.j_min = -radius;
  s.m[-s.j_min] = 1.0;
  s.dir = dir;
  s.kappa = kappa;
  return s;
}

double l1(const LatticeMassState& a, const LatticeMassState& b) {
  double s = 0;
  for (int j = std::min(a.j_min, b.j_min); j <= std::max(a.j_max(), b.j_max()); ++j) s += std::abs(a.at(j) - b.at(j));
  return s;
}
}  // namespace

TEST_SUITE("lattice") {
  TEST_CASE("rates") {
    LatticeMassState flat{-3, std::vector<double>(7, 0.4)};
    const auto r = rhs(flat, 1.0);
    for (int i = 1; i < 7; ++i) CHECK(r.dm[i] == 0.0);

    const auto p = point(3, Direction::Right);
    const auto rp = rhs(p, 1.0);
    CHECK(rp.dm[0] == -1.0);
    CHECK(rp.dm[1] == 1.0);

    const auto q = point(3, Direction::Symmetric);
    const auto rq = rhs(q, 1.0);
    CHECK(rq.dm[3] == -2.0);
    CHECK(rq.dm[2] == 1.0);
    CHECK(rq.dm[4] == 1.0);

    const auto lft = point(3, Direction::Left);
    const auto rl = rhs(lft, 1.0);
    CHECK(rl.dm[3] == -1.0);
    CHECK(rl.dm[2] == 1.0);
  }

  TEST_CASE("Poisson kernel") {
    for (double t : {0.3, 1.0, 4.0}) CHECK(rel(poisson_kernel(t, 0), std::exp(-t)) < 1e-15);
    CHECK(poisson_kernel(2.0, -3) == 0.0);
    CHECK(rel(poisson_kernel(2.0, 3), 8.0 / 6.0 * std::exp(-2.0)) < 1e-14);
    for (double t : {0.5, 1.0, 5.0}) {
      double s = 0;
      for (int j = 0; j <= static_cast<int>(t + 40 * std::sqrt(t)); ++j) s += poisson_kernel(t, j);
      CHECK(std::abs(s - 1.0) <= 1e-12);
    }
    CHECK(rel(fundamental_solution(1.5, 2, 0.3, 1), poisson_kernel(1.5, 2) * heat_kernel(1.5, 0.3, 1)) < 1e-15);
    CHECK(fundamental_solution(1.5, 2) == poisson_kernel(1.5, 2));
  }

  TEST_CASE("window radius bounds the kernel tail") {
    for (double T : {0.5, 2.0, 5.0, 20.0}) {
      const int R = window_radius(T);
      CHECK(R >= T + 10 * std::sqrt(T + 1));
      double tail = 0;
      for (int j = R + 1; j < R + 400; ++j) tail += poisson_kernel(T, j);
      CHECK(tail < 1e-12);
    }
  }

  TEST_CASE("exact and rk4 agree") {
    const auto s0 = point(40, Direction::Right);
    const auto a = integrate(s0, 5.0, LatticeMethod::ExactPoisson);
    const auto b = integrate(s0, 5.0, LatticeMethod::Rk4);
    double sup = 0;
    for (int j = 0; j <= 40; ++j) sup = std::max(sup, std::abs(a.states.back().at(j) - b.states.back().at(j)));
    CHECK(sup <= 1e-8);
    for (int j = 0; j <= 40; ++j) CHECK(rel(a.states.back().at(j), poisson_kernel(5.0, j)) < 1e-12);
    CHECK(std::abs(a.states.back().total() - 1.0) <= 1e-12);
    CHECK(std::abs(b.states.back().total() - 1.0) <= 1e-12);
  }

  TEST_CASE("zero horizon and cadence") {
    const auto s0 = point(10, Direction::Right);
    const auto z = integrate(s0, 0.0, LatticeMethod::ExactPoisson);
    REQUIRE(z.states.size() == 1);
    CHECK(z.states[0].m == s0.m);
    const auto c = integrate(s0, 1.0, LatticeMethod::Rk4, 0.25);
    REQUIRE(c.times.size() == 5);
    CHECK(c.times.back() == 1.0);
  }

  TEST_CASE("positivity, conservation, contraction") {
    LatticeMassState a{-20, std::vector<double>(41, 0.0)}, b = a;
    a.m[20] = 0.6;
    a.m[21] = 0.4;
    b.m[18] = 1.0;
    for (Direction d : {Direction::Right, Direction::Left, Direction::Symmetric}) {
      a.dir = b.dir = d;
      a.kappa = b.kappa = 0.8;
      const auto method = d == Direction::Symmetric ? LatticeMethod::Rk4 : LatticeMethod::ExactPoisson;
      const auto ta = integrate(a, 3.0, method), tb = integrate(b, 3.0, method);
      for (double v : ta.states.back().m) CHECK(v >= 0);
      CHECK(std::abs(ta.states.back().total() - 1.0) <= 1e-12);
      CHECK(l1(ta.states.back(), tb.states.back()) <= l1(a, b) + 1e-12);
    }
  }

  TEST_CASE("semigroup") {
    auto s0 = point(30, Direction::Right);
    s0.m[3] = 0.5;
    for (auto method : {LatticeMethod::ExactPoisson, LatticeMethod::Rk4}) {
      const auto once = integrate(s0, 2.5, method).states.back();
      const auto twice = integrate(integrate(s0, 1.0, method).states.back(), 1.5, method).states.back();
      CHECK(l1(once, twice) <= 1e-9);
    }
  }

  TEST_CASE("symmetric variant has no exact method") {
    CHECK_THROWS_AS(integrate(point(5, Direction::Symmetric), 1.0, LatticeMethod::ExactPoisson), MethodError);
    // kappa = 1: Skellam marginals e^{-2t} I_j(2t) at j = 0
    const auto s = integrate(point(30, Direction::Symmetric), 1.0, LatticeMethod::Rk4).states.back();
    CHECK(std::abs(s.at(0) - std::exp(-2.0) * std::cyl_bessel_i(0.0, 2.0)) < 1e-9);
    CHECK(std::abs(s.at(2) - std::exp(-2.0) * std::cyl_bessel_i(2.0, 2.0)) < 1e-9);
  }

  TEST_CASE("L1 comparison") {
    const auto tr = integrate(point(30, Direction::Right), 1.0, LatticeMethod::ExactPoisson, 0.01);
    const auto s = to_series(tr);
    CHECK(compare_l1(s, s, tr.times, tr.times) == 0.0);

    auto shifted = s;
    for (auto& w : shifted) w.j_min += 1;
    std::vector<double> err;
    for (double t : tr.times) {
      double e = 0;
      for (int j = 0; j <= 32; ++j) e += std::abs(poisson_kernel(t, j) - poisson_kernel(t, j - 1));
      err.push_back(e);
    }
    double oracle = 0;
    for (std::size_t k = 1; k < err.size(); ++k) oracle += 0.5 * (err[k] + err[k - 1]) * (tr.times[k] - tr.times[k - 1]);
    CHECK(std::abs(compare_l1(s, shifted, tr.times, tr.times) - oracle) <= 1e-12);

    auto other = tr.times;
    other[3] += 1e-3;
    CHECK_THROWS_AS(compare_l1(s, s, tr.times, other), GridMismatchError);
    CHECK_THROWS_AS(compare_l1(s, std::vector<WellSeries>(s.begin(), s.end() - 1), tr.times, tr.times),
                    GridMismatchError);
  }
}
