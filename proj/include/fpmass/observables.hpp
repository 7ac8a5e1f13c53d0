#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "fpmass/asymptotics.hpp"
#include "fpmass/fpsolver.hpp"
#include "fpmass/weights.hpp"

namespace fpmass {

// Values indexed by well number j = j_min, ..., j_min + size - 1.
struct WellSeries {
  int j_min = 0;
  std::vector<double> v;
  int j_max() const { return j_min + static_cast<int>(v.size()) - 1; }
  double at(int j) const { return (j < j_min || j > j_max()) ? 0.0 : v[j - j_min]; }
  double sum() const;
};

struct BarMasses {
  WellSeries m;
  std::vector<bool> zero_density;  // both neighbouring cells vanish
};

struct Dissipation {
  double total = 0;     // flux form over all faces
  double boundary = 0;  // part of total from faces lying on a maximum Q_j
  WellSeries per_well;  // w-form D_j; a face on Q_j is shared half and half
};

struct Moments {
  double P = 0, K = 0, V = 0;
};

struct DiagnosticsRecord {
  double t = 0;
  double E = 0;
  Dissipation D;
  Moments mom;
  double mass = 0;
  WellSeries m, mbar, mtilde;
};

WellSeries partial_masses(const DensityField& rho, const CriticalPoints& cp, int j_min, int j_max);
BarMasses substitute_bar(const DensityField& rho, const AsymptoticScalars& s, const PeriodicPotential& pot, int j_min,
                         int j_max);
// Covers every well touched by the grid, so the entries add up to the total mass.
WellSeries substitute_tilde(const DensityField& rho, const PsiTable& psi0, const CriticalPoints& cp);
double energy(const DensityField& rho, std::span<const double> heff, double nu);
double energy(const DensityField& rho, const PeriodicPotential& pot, double sigma, double nu);
Dissipation dissipation(const DensityField& rho, std::span<const double> heff, double nu, const CriticalPoints* cp,
                        int j_min = 0, int j_max = -1);
Moments moments(const DensityField& rho, const WeightPhi& phi);

// w_j^2 = mu_j rho / gamma on the cells of J_j; zero elsewhere.
std::vector<double> relative_density(const DensityField& rho, int j, const AsymptoticScalars& s,
                                     const GibbsEvaluator& g);

double moment_approximation_error(const DensityField& rho, const std::function<double(double)>& v,
                                  const WellSeries& masses, const CriticalPoints& cp);

// tau (E+ - E-)/dt + nu^4 D_mid, divided by nu^4 D_mid unless that is at roundoff level.
double energy_balance_residual(const DiagnosticsRecord& prev, const DiagnosticsRecord& next, double nu, double tau);

// Everything needed to turn snapshots on a well grid into diagnostics.
class TiltedDiagnostics {
 public:
  TiltedDiagnostics(const PeriodicPotential& pot, double sigma, double nu, const Grid1D& grid, int j_min, int j_max);
  DiagnosticsRecord operator()(double t, const DensityField& rho) const;

  const AsymptoticScalars& scalars() const { return s_; }
  const GibbsEvaluator& gibbs() const { return g_; }
  const std::vector<double>& heff() const { return heff_; }
  std::shared_ptr<const PsiTable> psi_table() const { return psi_; }
  const WeightPhi& phi() const { return phi_; }
  int j_min() const { return j_min_; }
  int j_max() const { return j_max_; }

  // gamma_j sampled at cell centres of J_j; grid mass is 1 up to the midpoint-rule error.
  DensityField local_gibbs(int j) const;
  DensityField gaussian(double p0, double width) const;

 private:
  PeriodicPotential pot_;
  AsymptoticScalars s_;
  GibbsEvaluator g_;
  Grid1D grid_;
  int j_min_, j_max_;
  std::vector<double> heff_;
  std::shared_ptr<const PsiTable> psi_;
  WeightPhi phi_;
};

}  // namespace fpmass
