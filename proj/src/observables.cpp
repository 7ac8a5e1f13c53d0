#include "fpmass/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fpmass/errors.hpp"

namespace fpmass {

double WellSeries::sum() const {
  double s = 0;
  for (double x : v) s += x;
  return s;
}

namespace {

// int_{p_lo}^{x} rho, piecewise constant cells
double cumulative_mass(const DensityField& rho, double x) {
  const Grid1D& g = rho.grid;
  const double tol = 1e-9 * g.h;
  if (x < g.p_lo - tol || x > g.p_hi() + tol) throw AlignmentError("well boundary outside the grid");
  double pos = std::clamp((x - g.p_lo) / g.h, 0.0, static_cast<double>(g.n));
  double r = std::round(pos);
  if (std::abs(pos - r) < 1e-9) pos = r;
  const int full = static_cast<int>(std::floor(pos));
  double s = 0;
  for (int i = 0; i < full; ++i) s += rho.values[i];
  if (full < g.n) s += (pos - full) * rho.values[full];
  return s * g.h;
}

bool on_edge(const Grid1D& g, double x, int* edge) {
  double pos = (x - g.p_lo) / g.h;
  double r = std::round(pos);
  if (edge) *edge = static_cast<int>(r);
  return std::abs(pos - r) < 1e-8;
}

}  // namespace

WellSeries partial_masses(const DensityField& rho, const CriticalPoints& cp, int j_min, int j_max) {
  WellSeries out{j_min, {}};
  double prev = cumulative_mass(rho, cp.p_max(j_min - 1));
  for (int j = j_min; j <= j_max; ++j) {
    double cur = cumulative_mass(rho, cp.p_max(j));
    out.v.push_back(cur - prev);
    prev = cur;
  }
  return out;
}

BarMasses substitute_bar(const DensityField& rho, const AsymptoticScalars& s, const PeriodicPotential& pot, int j_min,
                         int j_max) {
  const Grid1D& g = rho.grid;
  GibbsEvaluator gibbs(pot, s.sigma, s.nu);
  BarMasses out;
  out.m.j_min = j_min;
  // log(mu_j / gamma(P_j)) does not depend on j
  const double log_scale = s.log_mu0 - gibbs.log_gamma(s.cp.p_min0);
  for (int j = j_min; j <= j_max; ++j) {
    const double P = s.cp.p_min(j);
    double pos = (P - g.p_lo) / g.h - 0.5;
    int i = static_cast<int>(std::floor(pos));
    if (i < 0 || i + 1 >= g.n) throw WindowError("well bottom outside the grid");
    const double w = pos - i;
    const double r0 = rho.values[i], r1 = rho.values[i + 1];
    if (r0 <= 0 && r1 <= 0) {
      out.m.v.push_back(0.0);
      out.zero_density.push_back(true);
      continue;
    }
    // interpolate log(rho / gamma) linearly; exact when rho is a multiple of gamma
    const double d0 = gibbs.log_gamma(g.center(i)) - gibbs.log_gamma(P);
    const double d1 = gibbs.log_gamma(g.center(i + 1)) - gibbs.log_gamma(P);
    double val;
    if (r0 > 0 && r1 > 0) {
      val = std::exp(log_scale + (1 - w) * (std::log(r0) - d0) + w * (std::log(r1) - d1));
    } else {
      val = std::exp(log_scale) * ((1 - w) * r0 * std::exp(-d0) + w * r1 * std::exp(-d1));
    }
    out.m.v.push_back(val);
    out.zero_density.push_back(false);
  }
  return out;
}

WellSeries substitute_tilde(const DensityField& rho, const PsiTable& psi0, const CriticalPoints& cp) {
  const Grid1D& g = rho.grid;
  const double L = cp.period;
  auto k_of = [&](double p) { return static_cast<int>(std::floor((p - cp.p_min0) / L)); };
  const int k_lo = k_of(g.center(0)), k_hi = k_of(g.center(g.n - 1));
  WellSeries out{k_lo, std::vector<double>(k_hi - k_lo + 2, 0.0)};
  for (int i = 0; i < g.n; ++i) {
    const double p = g.center(i);
    const int k = k_of(p);
    const double s = psi0.value(p - k * L);
    // cell lies in K_k: weight 1 - s for well k, s for well k + 1
    out.v[k - k_lo] += (1.0 - s) * rho.values[i];
    out.v[k + 1 - k_lo] += s * rho.values[i];
  }
  for (double& x : out.v) x *= g.h;
  return out;
}

double energy(const DensityField& rho, std::span<const double> heff, double nu) {
  const double nu2 = nu * nu;
  double s = 0;
  for (std::size_t i = 0; i < rho.values.size(); ++i) {
    const double r = rho.values[i];
    if (r < 1e-300) continue;
    s += nu2 * r * std::log(r) + heff[i] * r;
  }
  return s * rho.grid.h;
}

double energy(const DensityField& rho, const PeriodicPotential& pot, double sigma, double nu) {
  auto he = sample_effective_potential(pot, sigma, rho.grid);
  return energy(rho, he, nu);
}

Dissipation dissipation(const DensityField& rho, std::span<const double> heff, double nu, const CriticalPoints* cp,
                        int j_min, int j_max) {
  const Grid1D& g = rho.grid;
  const double nu2 = nu * nu;
  const auto J = face_fluxes(rho.values, heff, nu, g.h);
  Dissipation out;
  if (cp) out.per_well = WellSeries{j_min, std::vector<double>(std::max(0, j_max - j_min + 1), 0.0)};
  for (int f = 0; f + 1 < g.n; ++f) {
    const double r0 = rho.values[f], r1 = rho.values[f + 1];
    const double u = (heff[f + 1] - heff[f]) / nu2;
    double flux_term = 0;
    if (r0 >= 1e-300 && r1 >= 1e-300) flux_term = J[f] * (std::log(r0) - std::log(r1) - u) / nu2;
    const double a = std::sqrt(r1) * std::exp(0.25 * u) - std::sqrt(r0) * std::exp(-0.25 * u);
    const double w_term = a * a / g.h;
    out.total += flux_term;
    if (!cp) continue;
    const double x = g.edge(f + 1);
    const double pos = (x - cp->p_max0) / cp->period;
    const double r = std::round(pos);
    const bool at_max = std::abs(pos - r) * cp->period < 1e-8 * g.h;
    if (at_max) {
      out.boundary += flux_term;
      const int jq = static_cast<int>(r);  // face sits on Q_jq, shared by wells jq and jq + 1
      for (int j : {jq, jq + 1})
        if (j >= j_min && j <= j_max) out.per_well.v[j - j_min] += 0.5 * w_term;
    } else {
      const int j = static_cast<int>(std::floor(pos)) + 1;
      if (j >= j_min && j <= j_max) out.per_well.v[j - j_min] += w_term;
    }
  }
  return out;
}

Moments moments(const DensityField& rho, const WeightPhi& phi) {
  const Grid1D& g = rho.grid;
  Moments m;
  for (int i = 0; i < g.n; ++i) {
    const double p = g.center(i), r = rho.values[i];
    m.P += p * r;
    m.V += p * p * r;
    m.K += phi(p) * r;
  }
  m.P *= g.h;
  m.V *= g.h;
  m.K *= g.h;
  return m;
}

std::vector<double> relative_density(const DensityField& rho, int j, const AsymptoticScalars& s,
                                     const GibbsEvaluator& g) {
  std::vector<double> w(rho.values.size(), 0.0);
  const double lo = s.cp.p_max(j - 1), hi = s.cp.p_max(j);
  for (int i = 0; i < rho.grid.n; ++i) {
    const double p = rho.grid.center(i);
    if (p <= lo || p >= hi || rho.values[i] <= 0) continue;
    w[i] = std::exp(s.log_mu(j) + std::log(rho.values[i]) - g.log_gamma(p));
  }
  return w;
}

double moment_approximation_error(const DensityField& rho, const std::function<double(double)>& v,
                                  const WellSeries& masses, const CriticalPoints& cp) {
  double a = 0;
  for (int i = 0; i < rho.grid.n; ++i) a += v(rho.grid.center(i)) * rho.values[i];
  a *= rho.grid.h;
  double b = 0;
  for (int j = masses.j_min; j <= masses.j_max(); ++j) b += masses.at(j) * v(cp.p_min(j));
  return std::abs(a - b);
}

double energy_balance_residual(const DiagnosticsRecord& prev, const DiagnosticsRecord& next, double nu, double tau) {
  const double dt = next.t - prev.t;
  if (!(dt > 0)) throw ConfigError("records must be in increasing time order");
  const double nu4 = nu * nu * nu * nu;
  const double dmid = 0.5 * (prev.D.total + next.D.total);
  const double r = tau * (next.E - prev.E) / dt + nu4 * dmid;
  const double scale = nu4 * dmid;
  // near equilibrium both terms are roundoff; report the absolute residual there
  const double noise = 1e3 * 2.2e-16 * tau * std::max(std::abs(prev.E), std::abs(next.E)) / dt;
  return scale > noise ? r / scale : r;
}

TiltedDiagnostics::TiltedDiagnostics(const PeriodicPotential& pot, double sigma, double nu, const Grid1D& grid,
                                     int j_min, int j_max)
    : pot_(pot),
      s_(compute_scalars(pot, sigma, nu)),
      g_(pot, sigma, nu),
      grid_(grid),
      j_min_(j_min),
      j_max_(j_max),
      heff_(sample_effective_potential(pot, sigma, grid)),
      psi_(std::make_shared<const PsiTable>(s_, g_)),
      phi_(psi_, s_.cp, j_min - 1, j_max) {
  int e;
  if (!on_edge(grid, s_.cp.p_max(j_min - 1), &e) || !on_edge(grid, s_.cp.p_max(j_max), &e))
    throw AlignmentError("grid ends are not at maxima of the effective potential");
}

DiagnosticsRecord TiltedDiagnostics::operator()(double t, const DensityField& rho) const {
  DiagnosticsRecord r;
  r.t = t;
  r.mass = rho.total_mass();
  r.E = energy(rho, heff_, s_.nu);
  r.D = dissipation(rho, heff_, s_.nu, &s_.cp, j_min_, j_max_);
  r.mom = moments(rho, phi_);
  r.m = partial_masses(rho, s_.cp, j_min_, j_max_);
  r.mbar = substitute_bar(rho, s_, pot_, j_min_, j_max_).m;
  r.mtilde = substitute_tilde(rho, *psi_, s_.cp);
  return r;
}

DensityField TiltedDiagnostics::local_gibbs(int j) const {
  LocalEquilibrium gj(j, s_, g_);
  DensityField d{grid_, std::vector<double>(grid_.n, 0.0)};
  for (int i = 0; i < grid_.n; ++i) d.values[i] = gj(grid_.center(i));
  return d;
}

DensityField TiltedDiagnostics::gaussian(double p0, double width) const {
  DensityField d{grid_, std::vector<double>(grid_.n, 0.0)};
  for (int i = 0; i < grid_.n; ++i) {
    const double z = (grid_.center(i) - p0) / width;
    d.values[i] = std::exp(-0.5 * z * z) / (width * std::sqrt(2 * std::numbers::pi));
  }
  return d;
}

}  // namespace fpmass
