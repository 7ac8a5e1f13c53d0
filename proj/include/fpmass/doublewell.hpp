#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "fpmass/fpsolver.hpp"
#include "fpmass/weights.hpp"

namespace fpmass {

// H(0) = 0 is the local maximum; minima P- < 0 < P+ with depths h- <= h+.
class DoubleWellPotential {
 public:
  struct Params {
    double p_minus, p_plus, h_minus, h_plus, omega0, omega_minus, omega_plus;
  };
  DoubleWellPotential(std::function<double(double)> H, std::function<double(double)> dH,
                      std::function<double(double)> d2H, Params params, std::string family);

  double operator()(double p) const { return H_(p); }
  double d1(double p) const { return dH_(p); }
  double d2(double p) const { return d2H_(p); }
  const Params& params() const { return prm_; }
  double p_minus() const { return prm_.p_minus; }
  double p_plus() const { return prm_.p_plus; }
  double h_minus() const { return prm_.h_minus; }
  double h_plus() const { return prm_.h_plus; }
  const std::string& family() const { return family_; }
  bool equal_barriers() const;  // |h- - h+| <= 1e-9

  // First point beyond the wells where H reaches `level`, left and right.
  std::pair<double, double> level_crossings(double level) const;

 private:
  std::function<double(double)> H_, dH_, d2H_;
  Params prm_;
  std::string family_;
};

// (p^2 - 1)^2 - 1
DoubleWellPotential make_symmetric_quartic();

// Two even sextics, one per well, joined by a smooth step supported inside (P-/2, P+/2).
// Curvatures: H''(0) = -2 pi omega0^2, H''(P+-) = 2 pi omega+-^2; requires omega+- > sqrt(2) omega0.
// Arguments with h- > h+ are mirrored.
DoubleWellPotential make_blended(double h_minus, double h_plus, double omega0, double omega_minus, double omega_plus);

struct DoubleWellScalars {
  double nu = 0;
  double log_mu_minus = 0, log_mu_plus = 0, log_eta = 0;
  double kappa = 1;  // mu- / mu+
  double log_tau = 0, tau = 0;
  double theta = 0;
  double energy_floor() const;  // -nu^2 ln(mu- + mu+)
};

DoubleWellScalars dw_scalars(const DoubleWellPotential& pot, double nu);

// Uniform grid with a cell edge at 0, truncated where H >= h+ + 60 nu^2.
Grid1D make_dw_grid(const DoubleWellPotential& pot, double nu, double cells_per_nu = 40.0);

DensityField dw_equilibrium(const DoubleWellPotential& pot, const DoubleWellScalars& s, const Grid1D& grid);
// gamma restricted to one well and normalized there; side < 0 for the left well.
DensityField dw_local_gibbs(const DoubleWellPotential& pot, const DoubleWellScalars& s, const Grid1D& grid, int side);

// psi(P-) = 0, psi' = 1/(eta gamma) on (P-, P+).
std::shared_ptr<const CumulativeTable> dw_weight_psi(const DoubleWellPotential& pot, const DoubleWellScalars& s);

struct DwMasses {
  double m_minus = 0, m_plus = 0;
  double mbar_minus = 0, mbar_plus = 0;
  double mtilde_minus = 0, mtilde_plus = 0;
  bool zero_minus = false, zero_plus = false;
};

DwMasses dw_substitute_masses(const DensityField& rho, const DoubleWellScalars& s, const DoubleWellPotential& pot,
                              const CumulativeTable& psi);

struct DwRecord {
  double t = 0;
  DwMasses m;
  double E = 0, D = 0;
};

struct DwBalance {
  std::vector<double> t, lhs, rhs;
  double max_relative = 0;
};

// (1 + theta) d m~+/dt against m-bar- - kappa m-bar+, central differences, for t >= t_from.
DwBalance dw_effective_rate(const std::vector<DwRecord>& records, const DoubleWellScalars& s, double t_from = 0.0);

enum class DwMode { Generic, EqualBarriers };

DwMode detect_mode(const DoubleWellPotential& pot);
void check_mode(const DoubleWellPotential& pot, DwMode mode);

struct DwOdePoint {
  double t, m_minus, m_plus;
};

std::vector<DwOdePoint> dw_limit_ode(double m0_minus, double m0_plus, const std::vector<double>& times, DwMode mode,
                                     double kappa);
std::vector<DwOdePoint> dw_limit_ode(const DoubleWellPotential& pot, double m0_minus, double m0_plus,
                                     const std::vector<double>& times, DwMode mode, double kappa);

// Bundles grid, generator input and weight for trajectory diagnostics.
class DoubleWellSystem {
 public:
  DoubleWellSystem(DoubleWellPotential pot, double nu, double cells_per_nu = 40.0);
  DwRecord operator()(double t, const DensityField& rho) const;
  const DoubleWellPotential& potential() const { return pot_; }
  const DoubleWellScalars& scalars() const { return s_; }
  const Grid1D& grid() const { return grid_; }
  const std::vector<double>& heff() const { return heff_; }
  const CumulativeTable& psi() const { return *psi_; }
  Tridiagonal generator() const { return build_generator(heff_, s_.nu, grid_.h); }

 private:
  DoubleWellPotential pot_;
  DoubleWellScalars s_;
  Grid1D grid_;
  std::vector<double> heff_;
  std::shared_ptr<const CumulativeTable> psi_;
};

}  // namespace fpmass
