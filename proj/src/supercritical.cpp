#include "fpmass/supercritical.hpp"

#include <cmath>

#include "fpmass/errors.hpp"
#include "fpmass/quadrature.hpp"

namespace fpmass {

double effective_velocity(const PeriodicPotential& pot, double sigma, VelocitySign sign) {
  const double margin = 1e-6 * (pot.sigma_hi() - pot.sigma_lo());
  const double L = pot.period();
  if (std::abs(sigma - pot.sigma_hi()) <= margin || std::abs(sigma - pot.sigma_lo()) <= margin)
    throw SingularIntegralError("tilt too close to the critical value; the velocity integral is singular");
  if (sigma < pot.sigma_hi() && sigma > pot.sigma_lo()) throw RegimeError("effective velocity needs a supercritical tilt");
  QuadratureOptions opt;
  opt.rel_tol = 1e-13;
  const double I = integrate([&](double p) { return 1.0 / (sigma - pot.d1(p)); }, 0.0, L, opt);
  const double lam = L / I;
  return sign == VelocitySign::Drift ? lam : -lam;
}

BallisticWeight::BallisticWeight(const PeriodicPotential& pot, double sigma, double nu)
    : pot_(pot), sigma_(sigma), nu2_(nu * nu) {
  if (!(sigma > pot.sigma_hi())) throw RegimeError("ballistic weight needs sigma above max H'");
  lambda_ = effective_velocity(pot, sigma);
  const double L = pot.period();
  A_ = window_integral(L) / -std::expm1(dG(0.0, L));
}

// int_0^p exp(G(q) - G(p)) dq; G rises at least at rate (sigma - max H') / nu^2, so only the last
// 40 decay lengths below p matter.
double BallisticWeight::window_integral(double p) const {
  if (p <= 0) return 0.0;
  const double a = std::max(0.0, p - 40.0 * nu2_ / (sigma_ - pot_.sigma_hi()));
  return integrate([&](double q) { return std::exp(dG(q, p)); }, a, p);
}

double BallisticWeight::dpsi(double p) const {
  const double L = pot_.period();
  p -= L * std::floor(p / L);
  return (window_integral(p) + A_ * std::exp(dG(0.0, p))) / nu2_;
}

double BallisticWeight::u0(double p) const { return 1.0 / (sigma_ - pot_.d1(p)); }

double BallisticWeight::u1(double p) const {
  const double d = sigma_ - pot_.d1(p);
  return -pot_.d2(p) / (d * d * d);
}

double BallisticWeight::periodicity_residual() const {
  const double L = pot_.period();
  const double at_L = (window_integral(L) + A_ * std::exp(dG(0.0, L))) / nu2_;
  const double at_0 = c();
  return std::abs(at_L - at_0) / at_0;
}

double BallisticWeight::mean_slope() const {
  const double L = pot_.period();
  QuadratureOptions opt;
  opt.rel_tol = 1e-10;
  opt.initial_panels = 16;
  return integrate([&](double p) { return dpsi(p); }, 0.0, L, opt) / L;
}

BallisticResult ballistic_weight(const PeriodicPotential& pot, double sigma, double nu) {
  BallisticWeight w(pot, sigma, nu);
  return BallisticResult{w.lambda(), w.c(), w};
}

BallisticCheck ballistic_check(const PeriodicPotential& pot, double sigma, double nu, double T, int n_cells, double dt,
                               double cadence) {
  if (!(T > 0) || !(dt > 0)) throw ConfigError("ballistic check needs positive T and dt");
  BallisticCheck out;
  out.lambda = effective_velocity(pot, sigma);
  const PeriodicGenerator G = build_periodic_generator(pot, sigma, nu, n_cells, 0.0);
  WindingState s{DensityField{G.grid, std::vector<double>(n_cells)}, 0.0};
  // start from the small-noise invariant density 1/(sigma - H'); a localized packet would make P(t) a
  // staircase with period L/lambda and bias the fit
  for (int i = 0; i < n_cells; ++i) s.rho.values[i] = 1.0 / (sigma - pot.d1(G.grid.center(i)));
  const double m0 = s.rho.total_mass();
  for (double& v : s.rho.values) v /= m0;
  auto emit = [&](double t) {
    out.t.push_back(t);
    out.P.push_back(s.first_moment());
    out.winding.push_back(s.winding);
  };
  emit(0.0);
  const long n_out = static_cast<long>(std::ceil(T / cadence - 1e-9));
  double t = 0;
  for (long k = 1; k <= n_out; ++k) {
    const double t_next = std::min(T, k * cadence);
    const long steps = std::max(1L, static_cast<long>(std::ceil((t_next - t) / dt - 1e-9)));
    const double h = (t_next - t) / steps;
    for (long i = 0; i < steps; ++i) s = step_periodic(s, h, G, 1.0, 1.0);
    t = t_next;
    emit(t);
  }
  // least squares on the second half
  double st = 0, sp = 0, stt = 0, stp = 0;
  int n = 0;
  for (std::size_t k = 0; k < out.t.size(); ++k) {
    if (out.t[k] < 0.5 * T) continue;
    st += out.t[k];
    sp += out.P[k];
    stt += out.t[k] * out.t[k];
    stp += out.t[k] * out.P[k];
    ++n;
  }
  out.slope = (n * stp - st * sp) / (n * stt - st * st);
  out.rel_err = std::abs(out.slope - out.lambda) / std::abs(out.lambda);
  return out;
}

}  // namespace fpmass
