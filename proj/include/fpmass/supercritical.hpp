#pragma once

#include <vector>

#include "fpmass/fpsolver.hpp"
#include "fpmass/potential.hpp"

namespace fpmass {

enum class VelocitySign {
  Drift,     // lambda = L / int_0^L dp / (sigma - H'), positive for sigma > max H'
  AsPrinted  // 1/lambda = (1/L) int_0^L dp / (H' - sigma)
};

double effective_velocity(const PeriodicPotential& pot, double sigma, VelocitySign sign = VelocitySign::Drift);

// Periodic solution of nu^2 psi'' = (H' - sigma) psi' + 1, written as psi'.
class BallisticWeight {
 public:
  BallisticWeight(const PeriodicPotential& pot, double sigma, double nu);
  double dpsi(double p) const;
  double c() const { return A_ / nu2_; }  // psi'(0)
  double u0(double p) const;
  double u1(double p) const;
  double periodicity_residual() const;
  double mean_slope() const;  // (1/L) int_0^L psi'
  double lambda() const { return lambda_; }

 private:
  PeriodicPotential pot_;
  double sigma_, nu2_, A_, lambda_;
  // G(q) - G(p) with G = (sigma p - H) / nu^2, differenced before the division
  double dG(double q, double p) const { return (sigma_ * (q - p) - (pot_(q) - pot_(p))) / nu2_; }
  double window_integral(double p) const;
};

struct BallisticResult {
  double lambda = 0;
  double c = 0;
  BallisticWeight weight;
};

BallisticResult ballistic_weight(const PeriodicPotential& pot, double sigma, double nu);

struct BallisticCheck {
  std::vector<double> t, P, winding;
  double slope = 0, lambda = 0, rel_err = 0;
};

// Periodic one-period run with tau = 1; slope of the unfolded first moment over the second half of [0, T].
BallisticCheck ballistic_check(const PeriodicPotential& pot, double sigma, double nu, double T, int n_cells = 2048,
                               double dt = 1e-3, double cadence = 0.05);

}  // namespace fpmass
