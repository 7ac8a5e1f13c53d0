#include "fpmass/doublewell.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fpmass/errors.hpp"
#include "fpmass/observables.hpp"
#include "fpmass/quadrature.hpp"

namespace fpmass {

DoubleWellPotential::DoubleWellPotential(std::function<double(double)> H, std::function<double(double)> dH,
                                         std::function<double(double)> d2H, Params params, std::string family)
    : H_(std::move(H)), dH_(std::move(dH)), d2H_(std::move(d2H)), prm_(params), family_(std::move(family)) {
  if (!(prm_.p_minus < 0 && 0 < prm_.p_plus)) throw ConfigError("double well needs P- < 0 < P+");
  if (!(prm_.h_minus > 0 && prm_.h_plus > 0)) throw ConfigError("double well depths must be positive");
  if (prm_.h_minus > prm_.h_plus + 1e-12) throw ConfigError("double well must be labelled with h- <= h+");
  if (!(prm_.omega0 > 0 && prm_.omega_minus > 0 && prm_.omega_plus > 0))
    throw ConfigError("double well curvatures must be positive");
  if (!(d2H_(0.0) < 0)) throw DegenerateError("p = 0 is not a maximum");
  // at least quadratic growth, checked far out
  const double R = 4.0 * std::max(-prm_.p_minus, prm_.p_plus);
  if (!(H_(R) > 0.5 * R * R * 1e-3 && H_(-R) > 0.5 * R * R * 1e-3)) throw ConfigError("double well does not grow");
}

bool DoubleWellPotential::equal_barriers() const { return std::abs(prm_.h_minus - prm_.h_plus) <= 1e-9; }

std::pair<double, double> DoubleWellPotential::level_crossings(double level) const {
  auto find = [&](double start, double dir) {
    double step = 0.05 * std::max(-prm_.p_minus, prm_.p_plus);
    double a = start, b = start + dir * step;
    int guard = 0;
    while (H_(b) < level) {
      a = b;
      b += dir * step;
      step *= 1.5;
      if (++guard > 200) throw DegenerateError("potential does not reach the truncation level");
    }
    for (int it = 0; it < 200; ++it) {
      double m = 0.5 * (a + b);
      if (H_(m) < level) a = m; else b = m;
    }
    return b;
  };
  return {find(prm_.p_minus, -1.0), find(prm_.p_plus, 1.0)};
}

DoubleWellPotential make_symmetric_quartic() {
  DoubleWellPotential::Params prm{-1.0, 1.0, 1.0, 1.0, std::sqrt(2.0 / std::numbers::pi),
                                  std::sqrt(4.0 / std::numbers::pi), std::sqrt(4.0 / std::numbers::pi)};
  return DoubleWellPotential([](double p) { return (p * p - 1) * (p * p - 1) - 1; },
                             [](double p) { return 4 * p * (p * p - 1); },
                             [](double p) { return 12 * p * p - 4; }, prm, "quartic");
}

namespace {

// Even sextic -k0 p^2/2 + c p^4 + e p^6 with minima at +-S, depth h and curvature k there.
struct Sextic {
  double k0, c, e, S;
  Sextic(double k0_, double h, double k) : k0(k0_) {
    const double x = 24 * h / (k + 4 * k0);
    S = std::sqrt(x);
    c = (4 * k0 - k) / 8 / x;
    e = (k - 2 * k0) / 12 / (x * x);
  }
  double h0(double p) const { const double q = p * p; return q * (-0.5 * k0 + q * (c + q * e)); }
  double h1(double p) const { const double q = p * p; return p * (-k0 + q * (4 * c + 6 * e * q)); }
  double h2(double p) const { const double q = p * p; return -k0 + q * (12 * c + 30 * e * q); }
};

// C-infinity step from 0 at p <= -a to 1 at p >= a, with two derivatives.
struct Step {
  double a;
  void eval(double p, double& f, double& f1, double& f2) const {
    f1 = f2 = 0;
    if (p <= -a) { f = 0; return; }
    if (p >= a) { f = 1; return; }
    const double t = (p + a) / (2 * a), u = 1 - t;
    const double g = 1 / t - 1 / u;
    f = 1 / (1 + std::exp(g));
    const double w = f * (1 - f);
    if (w == 0) return;
    const double g1 = -1 / (t * t) - 1 / (u * u), g2 = 2 / (t * t * t) - 2 / (u * u * u);
    const double s = 1 / (2 * a);
    f1 = -w * g1 * s;
    f2 = (w * (1 - 2 * f) * g1 * g1 - w * g2) * s * s;
  }
};

}  // namespace

DoubleWellPotential make_blended(double hm, double hp, double w0, double wm, double wp) {
  if (hm > hp) {  // mirror so that the shallow well sits on the left
    std::swap(hm, hp);
    std::swap(wm, wp);
  }
  if (!(hm > 0 && hp > 0 && w0 > 0)) throw ConfigError("blended double well needs positive depths and omega0");
  if (wm <= std::sqrt(2.0) * w0 || wp <= std::sqrt(2.0) * w0)
    throw ConfigError("blended double well needs omega+- > sqrt(2) omega0");
  const double twopi = 2 * std::numbers::pi;
  const double k0 = twopi * w0 * w0;
  const Sextic L(k0, hm, twopi * wm * wm), R(k0, hp, twopi * wp * wp);
  const Step chi{0.5 * std::min(L.S, R.S)};
  // the sides agree to second order at 0, so the blend keeps H''(0) = -k0 and leaves the wells untouched
  auto H = [=](double p) {
    double f, f1, f2;
    chi.eval(p, f, f1, f2);
    return L.h0(p) + f * (R.h0(p) - L.h0(p));
  };
  auto dH = [=](double p) {
    double f, f1, f2;
    chi.eval(p, f, f1, f2);
    const double d = R.h0(p) - L.h0(p);
    return L.h1(p) + f * (R.h1(p) - L.h1(p)) + f1 * d;
  };
  auto d2H = [=](double p) {
    double f, f1, f2;
    chi.eval(p, f, f1, f2);
    const double d0 = R.h0(p) - L.h0(p), d1 = R.h1(p) - L.h1(p);
    return L.h2(p) + f * (R.h2(p) - L.h2(p)) + 2 * f1 * d1 + f2 * d0;
  };
  // the blend must not create extra critical points
  const int n = 4000;
  for (int i = 1; i < n; ++i) {
    const double p = chi.a * (2.0 * i / n - 1);
    if (std::abs(p) < 1e-3 * chi.a) continue;
    if ((p < 0) != (dH(p) > 0)) throw ConfigError("blended double well has a spurious critical point");
  }
  DoubleWellPotential::Params prm{-L.S, R.S, hm, hp, w0, wm, wp};
  return DoubleWellPotential(H, dH, d2H, prm, "blended");
}

double DoubleWellScalars::energy_floor() const {
  const double a = std::max(log_mu_minus, log_mu_plus);
  return -nu * nu * (a + std::log(std::exp(log_mu_minus - a) + std::exp(log_mu_plus - a)));
}

DoubleWellScalars dw_scalars(const DoubleWellPotential& pot, double nu) {
  if (!(nu > 0)) throw ConfigError("nu must be positive");
  const double nu2 = nu * nu;
  const auto& q = pot.params();
  auto lg = [&](double p) { return -pot(p) / nu2; };
  auto log_int = [&](auto g, double a, double peak, double b) {
    const double shift = g(peak);
    auto f = [&](double p) { return std::exp(g(p) - shift); };
    return shift + std::log(integrate(f, a, peak) + integrate(f, peak, b));
  };
  DoubleWellScalars s;
  s.nu = nu;
  const double a_lo = pot.level_crossings(-q.h_minus + 60 * nu2).first;
  const double a_hi = pot.level_crossings(-q.h_plus + 60 * nu2).second;
  s.log_mu_minus = log_int(lg, a_lo, q.p_minus, 0.0);
  s.log_mu_plus = log_int(lg, 0.0, q.p_plus, a_hi);
  s.log_eta = log_int([&](double p) { return -lg(p); }, q.p_minus, 0.0, q.p_plus);
  s.kappa = std::exp(s.log_mu_minus - s.log_mu_plus);
  s.log_tau = std::log(q.omega0 * q.omega_minus) - q.h_minus / nu2;
  if (s.log_tau < -700) throw ScaleError("double-well time scale underflows");
  s.tau = std::exp(s.log_tau);
  s.theta = std::expm1(s.log_tau + s.log_mu_minus + s.log_eta - 2 * std::log(nu));
  return s;
}

Grid1D make_dw_grid(const DoubleWellPotential& pot, double nu, double cells_per_nu) {
  if (!(cells_per_nu >= 4)) throw ConfigError("too few cells per nu");
  const auto [lo, hi] = pot.level_crossings(pot.h_plus() + 60 * nu * nu);
  const double h = nu / cells_per_nu;
  const int n_lo = static_cast<int>(std::ceil(-lo / h)), n_hi = static_cast<int>(std::ceil(hi / h));
  return Grid1D{-n_lo * h, h, n_lo + n_hi};
}

DensityField dw_equilibrium(const DoubleWellPotential& pot, const DoubleWellScalars& s, const Grid1D& grid) {
  const double nu2 = s.nu * s.nu;
  const double a = std::max(s.log_mu_minus, s.log_mu_plus);
  const double log_z = a + std::log(std::exp(s.log_mu_minus - a) + std::exp(s.log_mu_plus - a));
  DensityField d{grid, std::vector<double>(grid.n)};
  for (int i = 0; i < grid.n; ++i) d.values[i] = std::exp(-pot(grid.center(i)) / nu2 - log_z);
  return d;
}

DensityField dw_local_gibbs(const DoubleWellPotential& pot, const DoubleWellScalars& s, const Grid1D& grid, int side) {
  const double nu2 = s.nu * s.nu;
  const double log_mu = side < 0 ? s.log_mu_minus : s.log_mu_plus;
  DensityField d{grid, std::vector<double>(grid.n, 0.0)};
  for (int i = 0; i < grid.n; ++i) {
    const double p = grid.center(i);
    if ((side < 0) == (p < 0)) d.values[i] = std::exp(-pot(p) / nu2 - log_mu);
  }
  return d;
}

std::shared_ptr<const CumulativeTable> dw_weight_psi(const DoubleWellPotential& pot, const DoubleWellScalars& s) {
  const double nu2 = s.nu * s.nu;
  const double a = pot.p_minus(), b = pot.p_plus();
  const int nodes = std::max(1024, static_cast<int>(std::ceil((b - a) / (s.nu / 40.0))));
  auto t = std::make_shared<const CumulativeTable>(
      a, b, [pot, nu2](double p) { return pot(p) / nu2; }, s.log_eta, nodes);
  if (std::abs(t->raw_total() - 1.0) > 1e-8) throw QuadratureError("double-well psi does not integrate to one");
  return t;
}

DwMasses dw_substitute_masses(const DensityField& rho, const DoubleWellScalars& s, const DoubleWellPotential& pot,
                              const CumulativeTable& psi) {
  const Grid1D& g = rho.grid;
  const double nu2 = s.nu * s.nu;
  DwMasses out;
  double total = 0, plus = 0, right = 0;
  for (int i = 0; i < g.n; ++i) {
    const double p = g.center(i), r = rho.values[i];
    total += r;
    plus += psi.value(p) * r;
    if (p > 0) right += r;
  }
  out.mtilde_plus = plus * g.h;
  out.mtilde_minus = (total - plus) * g.h;
  out.m_plus = right * g.h;
  out.m_minus = (total - right) * g.h;
  auto bar = [&](double P, double log_mu, bool& zero) {
    const double pos = (P - g.p_lo) / g.h - 0.5;
    const int i = static_cast<int>(std::floor(pos));
    if (i < 0 || i + 1 >= g.n) throw WindowError("well bottom outside the grid");
    const double w = pos - i;
    const double r0 = rho.values[i], r1 = rho.values[i + 1];
    zero = r0 <= 0 && r1 <= 0;
    if (zero) return 0.0;
    const double l0 = pot(g.center(i)) / nu2, l1 = pot(g.center(i + 1)) / nu2;  // -log gamma
    if (r0 > 0 && r1 > 0) return std::exp(log_mu + (1 - w) * (std::log(r0) + l0) + w * (std::log(r1) + l1));
    return (1 - w) * r0 * std::exp(log_mu + l0) + w * r1 * std::exp(log_mu + l1);
  };
  out.mbar_minus = bar(pot.p_minus(), s.log_mu_minus, out.zero_minus);
  out.mbar_plus = bar(pot.p_plus(), s.log_mu_plus, out.zero_plus);
  return out;
}

DwBalance dw_effective_rate(const std::vector<DwRecord>& rec, const DoubleWellScalars& s, double t_from) {
  DwBalance b;
  double scale = 0;
  for (std::size_t k = 1; k + 1 < rec.size(); ++k) {
    if (rec[k].t < t_from) continue;
    const double d = (rec[k + 1].m.mtilde_plus - rec[k - 1].m.mtilde_plus) / (rec[k + 1].t - rec[k - 1].t);
    b.t.push_back(rec[k].t);
    b.lhs.push_back((1 + s.theta) * d);
    b.rhs.push_back(rec[k].m.mbar_minus - s.kappa * rec[k].m.mbar_plus);
    scale = std::max(scale, std::abs(b.rhs.back()));
  }
  for (std::size_t k = 0; k < b.t.size(); ++k) {
    const double den = std::max(std::abs(b.lhs[k]), std::abs(b.rhs[k]));
    if (den < 1e-3 * scale || den == 0) continue;
    b.max_relative = std::max(b.max_relative, std::abs(b.lhs[k] - b.rhs[k]) / den);
  }
  return b;
}

DwMode detect_mode(const DoubleWellPotential& pot) {
  return pot.equal_barriers() ? DwMode::EqualBarriers : DwMode::Generic;
}

void check_mode(const DoubleWellPotential& pot, DwMode mode) {
  if (mode != detect_mode(pot)) throw ModeError("limit mode does not match the barrier heights of the potential");
}

std::vector<DwOdePoint> dw_limit_ode(double m0_minus, double m0_plus, const std::vector<double>& times, DwMode mode,
                                     double kappa) {
  if (m0_minus < 0 || m0_plus < 0) throw ConfigError("initial masses must be nonnegative");
  std::vector<DwOdePoint> out;
  const double M = m0_minus + m0_plus;
  for (double t : times) {
    if (mode == DwMode::Generic) {
      const double mm = m0_minus * std::exp(-t);
      out.push_back({t, mm, M - mm});
    } else {
      const double inf = M / (1 + kappa);
      const double mp = inf + (m0_plus - inf) * std::exp(-(1 + kappa) * t);
      out.push_back({t, M - mp, mp});
    }
  }
  return out;
}

std::vector<DwOdePoint> dw_limit_ode(const DoubleWellPotential& pot, double m0_minus, double m0_plus,
                                     const std::vector<double>& times, DwMode mode, double kappa) {
  check_mode(pot, mode);
  return dw_limit_ode(m0_minus, m0_plus, times, mode, kappa);
}

DoubleWellSystem::DoubleWellSystem(DoubleWellPotential pot, double nu, double cells_per_nu)
    : pot_(std::move(pot)), s_(dw_scalars(pot_, nu)), grid_(make_dw_grid(pot_, nu, cells_per_nu)) {
  heff_.resize(grid_.n);
  for (int i = 0; i < grid_.n; ++i) heff_[i] = pot_(grid_.center(i));
  psi_ = dw_weight_psi(pot_, s_);
}

DwRecord DoubleWellSystem::operator()(double t, const DensityField& rho) const {
  DwRecord r;
  r.t = t;
  r.m = dw_substitute_masses(rho, s_, pot_, *psi_);
  r.E = energy(rho, heff_, s_.nu);
  r.D = dissipation(rho, heff_, s_.nu, nullptr).total;
  return r;
}

}  // namespace fpmass
