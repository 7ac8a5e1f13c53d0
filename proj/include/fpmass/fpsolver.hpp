#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fpmass/potential.hpp"

namespace fpmass {

struct Grid1D {
  double p_lo = 0;
  double h = 0;
  int n = 0;
  double p_hi() const { return p_lo + n * h; }
  double center(int i) const { return p_lo + (i + 0.5) * h; }
  double edge(int i) const { return p_lo + i * h; }
};

// Uniform grid from Q_{j_min - 1} to Q_{j_max}; every Q_j is a cell edge.
Grid1D make_well_grid(const CriticalPoints& cp, int j_min, int j_max, int cells_per_well);

struct DensityField {
  Grid1D grid;
  std::vector<double> values;
  double total_mass() const;
};

struct Tridiagonal {
  std::vector<double> lower, diag, upper;  // lower[0] and upper[n-1] unused
  std::size_t size() const { return diag.size(); }
  void apply(std::span<const double> x, std::span<double> y) const;
};

// u / (e^u - 1)
double bernoulli(double u);

std::vector<double> sample_effective_potential(const PeriodicPotential& pot, double sigma, const Grid1D& g);

// Rightward flux J_{i+1/2} = (nu^2/h) [B(u) rho_i - B(-u) rho_{i+1}], no flux at both ends.
Tridiagonal build_generator(std::span<const double> heff, double nu, double h);
Tridiagonal build_generator(const PeriodicPotential& pot, double sigma, double nu, const Grid1D& g);

// Face fluxes of the same discretization; result has n-1 entries.
std::vector<double> face_fluxes(std::span<const double> rho, std::span<const double> heff, double nu, double h);

struct SolverConfig {
  double nu = 0.5;
  double sigma = 0.0;
  double tau = 1.0;
  double scheme_theta = 1.0;  // 1 = implicit Euler, 1/2 = Crank-Nicolson
  double dt_initial = 0.0;    // 0: min(1e-3, tau h^2 / (2 nu^2))
  double dt_max = 0.0;        // 0: 1e-2 T
  double growth = 1.2;
  double tol = 1e-6;          // step-doubling L1 error per step
  bool adaptive = true;
  double fixed_dt = 0.0;      // used when adaptive is false
  bool keep_snapshots = true;
};

// A must conserve mass (zero column sums); its diagonal is not read.
DensityField step(const DensityField& rho, double dt, const Tridiagonal& A, double tau, double scheme_theta = 1.0);

struct SolveResult {
  std::vector<double> times;
  std::vector<DensityField> snapshots;
  DensityField final_state;
  long accepted = 0, rejected = 0;
};

using Observer = std::function<void(double t, const DensityField&)>;

// Observer is called at t = 0, cadence, 2 cadence, ..., T; on_step after each accepted step.
SolveResult solve(const DensityField& rho0, double T, const Tridiagonal& A, const SolverConfig& cfg, double cadence,
                  const Observer& observer = {}, const Observer& on_step = {});

// One period [p0, p0 + L) with a wrap face joining the last and first cell.
struct PeriodicGenerator {
  Grid1D grid;
  double period = 0;
  Tridiagonal A;           // interior faces
  double wrap_b_plus = 0;  // (nu^2/h) B(u_wrap)
  double wrap_b_minus = 0; // (nu^2/h) B(-u_wrap)
  double wrap_flux(std::span<const double> rho) const;
};

PeriodicGenerator build_periodic_generator(const PeriodicPotential& pot, double sigma, double nu, int n_cells,
                                           double p0 = 0.0);

struct WindingState {
  DensityField rho;
  double winding = 0;  // net mass carried rightward through the wrap face
  double first_moment() const;  // unfolded: sum p rho h + L * winding
};

WindingState step_periodic(const WindingState& s, double dt, const PeriodicGenerator& G, double tau,
                           double scheme_theta = 1.0);

// x-profile for product data a(x) b(p); the x-Laplacian commutes with the p-operator.
struct XProfile {
  enum class Kind { Gaussian, Point, Gridded } kind = Kind::Gaussian;
  int dim = 1;
  std::vector<double> center;  // Gaussian mean / point location, size dim
  double variance = 1.0;       // per-dimension variance of the Gaussian
  std::vector<double> x, a;    // gridded profile, dim == 1 only

  static XProfile gaussian(std::vector<double> mean, double variance);
  static XProfile point(std::vector<double> x0);
  static XProfile gridded(std::vector<double> x, std::vector<double> a);
};

double heat_kernel(double t, double r2, int dim);

struct ProductSolution {
  XProfile x0;
  double t = 0;
  DensityField p_part;
  double heat_value(std::span<const double> x) const;  // heat-evolved a(x) at time t
  double x_fisher_information() const;                 // int |grad a|^2 / a, Gaussian profiles only
  double x_second_moment() const;                      // int |x|^2 a, Gaussian and point profiles
};

ProductSolution product_solution(const XProfile& x_profile, const DensityField& p_at_t, double t);

// Splits a sampled f(x_i, p_k) (row-major, nx by np) into a(x) b(p); UnsupportedError unless rank one.
std::pair<std::vector<double>, std::vector<double>> factor_product_data(std::span<const double> f, int nx, int np,
                                                                        double rel_tol = 1e-10);

}  // namespace fpmass
