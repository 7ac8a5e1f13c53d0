#include "fpmass/fpsolver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fpmass/errors.hpp"

namespace fpmass {

Grid1D make_well_grid(const CriticalPoints& cp, int j_min, int j_max, int cells_per_well) {
  if (cells_per_well < 16) throw ConfigError("at least 16 cells per well are required");
  if (j_max < j_min) throw ConfigError("empty well window");
  Grid1D g;
  g.p_lo = cp.p_max(j_min - 1);
  g.n = (j_max - j_min + 1) * cells_per_well;
  g.h = cp.period / cells_per_well;
  return g;
}

namespace {
double compensated_sum(std::span<const double> v) {
  double s = 0, c = 0;
  for (double x : v) {
    const double t = s + x;
    c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  return s + c;
}
}  // namespace

double DensityField::total_mass() const { return compensated_sum(values) * grid.h; }

void Tridiagonal::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = diag.size();
  for (std::size_t i = 0; i < n; ++i) {
    double v = diag[i] * x[i];
    if (i > 0) v += lower[i] * x[i - 1];
    if (i + 1 < n) v += upper[i] * x[i + 1];
    y[i] = v;
  }
}

double bernoulli(double u) {
  if (std::abs(u) < 1e-4) return 1.0 - 0.5 * u + u * u / 12.0;
  return u / std::expm1(u);
}

std::vector<double> sample_effective_potential(const PeriodicPotential& pot, double sigma, const Grid1D& g) {
  std::vector<double> v(g.n);
  for (int i = 0; i < g.n; ++i) v[i] = pot.effective(g.center(i), sigma);
  return v;
}

Tridiagonal build_generator(std::span<const double> heff, double nu, double h) {
  const std::size_t n = heff.size();
  Tridiagonal A;
  A.lower.assign(n, 0.0);
  A.diag.assign(n, 0.0);
  A.upper.assign(n, 0.0);
  const double nu2 = nu * nu, c = nu2 / (h * h);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double u = (heff[i + 1] - heff[i]) / nu2;
    const double bp = c * bernoulli(u), bm = c * bernoulli(-u);
    A.diag[i] -= bp;
    A.upper[i] += bm;
    A.lower[i + 1] += bp;
    A.diag[i + 1] -= bm;
  }
  return A;
}

Tridiagonal build_generator(const PeriodicPotential& pot, double sigma, double nu, const Grid1D& g) {
  auto he = sample_effective_potential(pot, sigma, g);
  return build_generator(he, nu, g.h);
}

std::vector<double> face_fluxes(std::span<const double> rho, std::span<const double> heff, double nu, double h) {
  const std::size_t n = rho.size();
  std::vector<double> J(n > 0 ? n - 1 : 0);
  const double nu2 = nu * nu;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double u = (heff[i + 1] - heff[i]) / nu2;
    J[i] = nu2 / h * (bernoulli(u) * rho[i] - bernoulli(-u) * rho[i + 1]);
  }
  return J;
}

namespace {

// Solves (I - c A) x = r in place for a conservative A (zero column sums, nonnegative off-diagonals).
// The pivots are rebuilt from the off-diagonals as excess + outflow, so no step subtracts large
// numbers and the solution keeps full relative accuracy however stiff c A is.
void conservative_solve(const Tridiagonal& A, double c, std::vector<double>& r) {
  const std::size_t n = r.size();
  std::vector<double> piv(n);
  double excess = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double down = i + 1 < n ? c * A.lower[i + 1] : 0.0;  // flow from i into i + 1
    piv[i] = excess + down;
    if (!(piv[i] > 0) || !std::isfinite(piv[i])) throw SingularSystemError("zero pivot in tridiagonal solve");
    if (i + 1 < n) {
      r[i + 1] += down * r[i] / piv[i];
      excess = 1.0 + c * A.upper[i] * excess / piv[i];
    }
  }
  r[n - 1] /= piv[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) r[i] = (r[i] + c * A.upper[i] * r[i + 1]) / piv[i];
}

std::vector<double> explicit_part(const Tridiagonal& A, std::span<const double> x, double c) {
  std::vector<double> y(x.size());
  if (c == 0.0) {
    std::copy(x.begin(), x.end(), y.begin());
    return y;
  }
  A.apply(x, y);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] + c * y[i];
  return y;
}

double l1_distance(const std::vector<double>& a, const std::vector<double>& b, double h) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s * h;
}

}  // namespace

DensityField step(const DensityField& rho, double dt, const Tridiagonal& A, double tau, double th) {
  if (!(dt > 0)) throw ConfigError("time step must be positive");
  if (th < 0.5 || th > 1.0) throw ConfigError("scheme parameter must lie in [1/2, 1]");
  DensityField out{rho.grid, explicit_part(A, rho.values, (1.0 - th) * dt / tau)};
  conservative_solve(A, th * dt / tau, out.values);
  // Roundoff still moves the total mass by a few ulps per step.
  const double before = compensated_sum(rho.values), after = compensated_sum(out.values);
  if (before > 0 && after > 0)
    for (double& v : out.values) v *= before / after;
  return out;
}

SolveResult solve(const DensityField& rho0, double T, const Tridiagonal& A, const SolverConfig& cfg, double cadence,
                  const Observer& observer, const Observer& on_step) {
  if (T < 0) throw ConfigError("final time must be nonnegative");
  if (rho0.values.size() != A.size()) throw GridMismatchError("density and generator sizes differ");
  SolveResult res;
  auto record = [&](double t, const DensityField& r) {
    res.times.push_back(t);
    if (cfg.keep_snapshots) res.snapshots.push_back(r);
    if (observer) observer(t, r);
  };
  DensityField cur = rho0;
  record(0.0, cur);
  if (T == 0.0) {
    res.final_state = cur;
    return res;
  }
  if (!(cadence > 0)) cadence = T;
  const double h = rho0.grid.h;
  double dt = cfg.adaptive ? (cfg.dt_initial > 0 ? cfg.dt_initial
                                                  : std::min(1e-3, cfg.tau / (cfg.nu * cfg.nu) * h * h * 0.5))
                           : cfg.fixed_dt;
  if (!(dt > 0)) throw ConfigError("fixed time step must be positive");
  const double dt_max = cfg.dt_max > 0 ? cfg.dt_max : 1e-2 * T;
  double t = 0.0;
  long k_out = 1;
  const long n_out = static_cast<long>(std::ceil(T / cadence - 1e-9));
  while (k_out <= n_out) {
    const double t_next = std::min(T, k_out * cadence);
    double dt_try = std::min(dt, t_next - t);
    bool hits = dt_try >= t_next - t - 1e-12 * std::max(1.0, t_next);
    if (hits) dt_try = t_next - t;
    DensityField next;
    if (cfg.adaptive) {
      DensityField full = step(cur, dt_try, A, cfg.tau, cfg.scheme_theta);
      DensityField half = step(cur, 0.5 * dt_try, A, cfg.tau, cfg.scheme_theta);
      half = step(half, 0.5 * dt_try, A, cfg.tau, cfg.scheme_theta);
      const double err = l1_distance(full.values, half.values, h);
      if (err > cfg.tol && dt_try > 1e-14) {
        ++res.rejected;
        dt = 0.5 * dt_try;
        continue;
      }
      next = std::move(half);
      if (!hits || dt_try >= dt) dt = std::min(dt_max, dt_try * cfg.growth);
    } else {
      next = step(cur, dt_try, A, cfg.tau, cfg.scheme_theta);
    }
    ++res.accepted;
    t = hits ? t_next : t + dt_try;
    cur = std::move(next);
    if (on_step) on_step(t, cur);
    if (hits) {
      record(t, cur);
      ++k_out;
    }
  }
  res.final_state = std::move(cur);
  return res;
}

double PeriodicGenerator::wrap_flux(std::span<const double> rho) const {
  return grid.h * (wrap_b_plus * rho[rho.size() - 1] - wrap_b_minus * rho[0]);
}

PeriodicGenerator build_periodic_generator(const PeriodicPotential& pot, double sigma, double nu, int n_cells,
                                           double p0) {
  if (n_cells < 16) throw ConfigError("at least 16 cells per period are required");
  PeriodicGenerator G;
  G.period = pot.period();
  G.grid = Grid1D{p0, G.period / n_cells, n_cells};
  auto he = sample_effective_potential(pot, sigma, G.grid);
  G.A = build_generator(he, nu, G.grid.h);
  const double nu2 = nu * nu, h = G.grid.h;
  const double he_first_shifted = pot.effective(G.grid.center(0) + G.period, sigma);
  const double u = (he_first_shifted - he[n_cells - 1]) / nu2;
  G.wrap_b_plus = nu2 / (h * h) * bernoulli(u);
  G.wrap_b_minus = nu2 / (h * h) * bernoulli(-u);
  return G;
}

double WindingState::first_moment() const {
  double s = 0;
  for (int i = 0; i < rho.grid.n; ++i) s += rho.grid.center(i) * rho.values[i];
  return s * rho.grid.h + rho.grid.n * rho.grid.h * winding;
}

namespace {

// Generator with the wrap face added, applied to x.
void apply_periodic(const PeriodicGenerator& G, std::span<const double> x, std::span<double> y) {
  G.A.apply(x, y);
  const std::size_t n = x.size();
  const double f = G.wrap_b_plus * x[n - 1] - G.wrap_b_minus * x[0];
  y[n - 1] -= f;
  y[0] += f;
}

// Plain Thomas on explicit bands: a sub-, b main, u super-diagonal.
void banded_solve(const std::vector<double>& a, std::vector<double> b, const std::vector<double>& u,
                  std::vector<double>& r) {
  const std::size_t n = r.size();
  for (std::size_t i = 1; i < n; ++i) {
    if (b[i - 1] == 0.0) throw SingularSystemError("zero pivot in tridiagonal solve");
    const double m = a[i] / b[i - 1];
    b[i] -= m * u[i - 1];
    r[i] -= m * r[i - 1];
  }
  if (b[n - 1] == 0.0) throw SingularSystemError("zero pivot in tridiagonal solve");
  r[n - 1] /= b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) r[i] = (r[i] - u[i] * r[i + 1]) / b[i];
}

// (I - c A_periodic) x = r by Sherman-Morrison on the cyclic tridiagonal matrix.
void cyclic_solve(const PeriodicGenerator& G, double c, std::vector<double>& r) {
  const std::size_t n = r.size();
  std::vector<double> a(n), b(n), u(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = -c * G.A.lower[i];
    b[i] = 1.0 - c * G.A.diag[i];
    u[i] = -c * G.A.upper[i];
  }
  // wrap face: cell n-1 sends bp x_{n-1} to cell 0, cell 0 sends bm x_0 to cell n-1
  b[0] += c * G.wrap_b_minus;
  b[n - 1] += c * G.wrap_b_plus;
  const double alpha = -c * G.wrap_b_plus;  // M[0][n-1]
  const double beta = -c * G.wrap_b_minus;  // M[n-1][0]
  const double gam = -b[0];
  std::vector<double> bm = b;
  bm[0] -= gam;
  bm[n - 1] -= alpha * beta / gam;
  banded_solve(a, bm, u, r);
  std::vector<double> z(n, 0.0);
  // M = M' + w v^T with w = (gam, 0, ..., beta), v = (1, 0, ..., alpha / gam)
  z[0] = gam;
  z[n - 1] = beta;
  banded_solve(a, bm, u, z);
  const double fact = (r[0] + alpha * r[n - 1] / gam) / (1.0 + z[0] + alpha * z[n - 1] / gam);
  for (std::size_t i = 0; i < n; ++i) r[i] -= fact * z[i];
}

}  // namespace

WindingState step_periodic(const WindingState& s, double dt, const PeriodicGenerator& G, double tau, double th) {
  if (!(dt > 0)) throw ConfigError("time step must be positive");
  const std::size_t n = s.rho.values.size();
  const double ce = (1.0 - th) * dt / tau, ci = th * dt / tau;
  std::vector<double> rhs(n);
  if (ce != 0.0) {
    apply_periodic(G, s.rho.values, rhs);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = s.rho.values[i] + ce * rhs[i];
  } else {
    rhs = s.rho.values;
  }
  cyclic_solve(G, ci, rhs);
  WindingState out{DensityField{s.rho.grid, std::move(rhs)}, s.winding};
  out.winding += dt / tau * (th * G.wrap_flux(out.rho.values) + (1.0 - th) * G.wrap_flux(s.rho.values));
  return out;
}

XProfile XProfile::gaussian(std::vector<double> mean, double variance) {
  if (mean.empty() || !(variance > 0)) throw ConfigError("gaussian x-profile needs a mean and positive variance");
  XProfile x;
  x.kind = Kind::Gaussian;
  x.dim = static_cast<int>(mean.size());
  x.center = std::move(mean);
  x.variance = variance;
  return x;
}

XProfile XProfile::point(std::vector<double> x0) {
  if (x0.empty()) throw ConfigError("point x-profile needs a location");
  XProfile x;
  x.kind = Kind::Point;
  x.dim = static_cast<int>(x0.size());
  x.center = std::move(x0);
  return x;
}

XProfile XProfile::gridded(std::vector<double> xs, std::vector<double> a) {
  if (xs.size() != a.size() || xs.size() < 2) throw ConfigError("gridded x-profile needs matching samples");
  XProfile x;
  x.kind = Kind::Gridded;
  x.dim = 1;
  x.x = std::move(xs);
  x.a = std::move(a);
  return x;
}

double heat_kernel(double t, double r2, int dim) {
  if (!(t > 0)) throw ConfigError("heat kernel needs t > 0");
  return std::pow(4.0 * std::numbers::pi * t, -0.5 * dim) * std::exp(-r2 / (4.0 * t));
}

ProductSolution product_solution(const XProfile& x_profile, const DensityField& p_at_t, double t) {
  if (t < 0) throw ConfigError("time must be nonnegative");
  return ProductSolution{x_profile, t, p_at_t};
}

double ProductSolution::heat_value(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != x0.dim) throw ConfigError("x has the wrong dimension");
  switch (x0.kind) {
    case XProfile::Kind::Gaussian: {
      const double v = x0.variance + 2.0 * t;
      double r2 = 0;
      for (int d = 0; d < x0.dim; ++d) r2 += (x[d] - x0.center[d]) * (x[d] - x0.center[d]);
      return std::pow(2.0 * std::numbers::pi * v, -0.5 * x0.dim) * std::exp(-r2 / (2.0 * v));
    }
    case XProfile::Kind::Point: {
      if (t == 0.0) throw UnsupportedError("point profile at t = 0 is a Dirac mass");
      double r2 = 0;
      for (int d = 0; d < x0.dim; ++d) r2 += (x[d] - x0.center[d]) * (x[d] - x0.center[d]);
      return heat_kernel(t, r2, x0.dim);
    }
    case XProfile::Kind::Gridded: {
      const auto& xs = x0.x;
      const auto& a = x0.a;
      if (t == 0.0) {
        if (x[0] <= xs.front() || x[0] >= xs.back()) return 0.0;
        auto it = std::upper_bound(xs.begin(), xs.end(), x[0]);
        std::size_t k = it - xs.begin();
        double w = (x[0] - xs[k - 1]) / (xs[k] - xs[k - 1]);
        return (1 - w) * a[k - 1] + w * a[k];
      }
      // trapezoidal convolution with the kernel
      double s = 0;
      for (std::size_t k = 0; k < xs.size(); ++k) {
        double w = 0.5 * ((k + 1 < xs.size() ? xs[k + 1] - xs[k] : 0.0) + (k > 0 ? xs[k] - xs[k - 1] : 0.0));
        s += w * a[k] * heat_kernel(t, (x[0] - xs[k]) * (x[0] - xs[k]), 1);
      }
      return s;
    }
  }
  return 0.0;
}

double ProductSolution::x_fisher_information() const {
  double v;
  if (x0.kind == XProfile::Kind::Gaussian) v = x0.variance + 2.0 * t;
  else if (x0.kind == XProfile::Kind::Point && t > 0) v = 2.0 * t;
  else throw UnsupportedError("x-dissipation is only available for Gaussian profiles");
  return x0.dim / v;
}

double ProductSolution::x_second_moment() const {
  double c2 = 0;
  for (double c : x0.center) c2 += c * c;
  if (x0.kind == XProfile::Kind::Gaussian) return c2 + x0.dim * (x0.variance + 2.0 * t);
  if (x0.kind == XProfile::Kind::Point) return c2 + x0.dim * 2.0 * t;
  throw UnsupportedError("x second moment is only available for Gaussian and point profiles");
}

std::pair<std::vector<double>, std::vector<double>> factor_product_data(std::span<const double> f, int nx, int np,
                                                                        double rel_tol) {
  if (static_cast<int>(f.size()) != nx * np || nx < 1 || np < 1) throw ConfigError("sample array has the wrong size");
  int best = 0;
  double best_norm = -1, fmax = 0;
  for (int i = 0; i < nx; ++i) {
    double s = 0;
    for (int k = 0; k < np; ++k) {
      s += f[i * np + k] * f[i * np + k];
      fmax = std::max(fmax, std::abs(f[i * np + k]));
    }
    if (s > best_norm) { best_norm = s; best = i; }
  }
  std::vector<double> b(f.begin() + best * np, f.begin() + (best + 1) * np), a(nx);
  if (best_norm <= 0) throw UnsupportedError("initial data vanish identically");
  for (int i = 0; i < nx; ++i) {
    double s = 0;
    for (int k = 0; k < np; ++k) s += f[i * np + k] * b[k];
    a[i] = s / best_norm;
  }
  for (int i = 0; i < nx; ++i)
    for (int k = 0; k < np; ++k)
      if (std::abs(f[i * np + k] - a[i] * b[k]) > rel_tol * fmax)
        throw UnsupportedError("initial data are not of product form");
  return {a, b};
}

}  // namespace fpmass
