#pragma once

#include <cmath>

#include "fpmass/potential.hpp"
#include "fpmass/quadrature.hpp"

namespace fpmass {

// exp(mantissa_log + shift) kept apart so the large part never overflows.
struct Scaled {
  double mantissa;
  double shift;  // natural-log exponent
  double value() const { return mantissa * std::exp(shift); }
};

class GibbsEvaluator {
 public:
  GibbsEvaluator(const PeriodicPotential& pot, double sigma, double nu) : pot_(pot), sigma_(sigma), nu2_(nu * nu) {}

  double log_gamma(double p) const { return (-pot_(p) + sigma_ * p) / nu2_; }
  Scaled gamma(double p, double shift) const { return {std::exp(log_gamma(p) - shift), shift}; }
  Scaled inv_gamma(double p, double shift) const { return {std::exp(-log_gamma(p) - shift), shift}; }

  const PeriodicPotential& potential() const { return pot_; }
  double sigma() const { return sigma_; }
  double nu() const { return std::sqrt(nu2_); }

 private:
  PeriodicPotential pot_;
  double sigma_, nu2_;
};

struct AsymptoticScalars {
  double sigma = 0, nu = 0;
  CriticalPoints cp;
  KramersData kd;
  double log_mu0 = 0, log_eta0 = 0;
  double log_kappa = 0;  // -sigma L / nu^2
  double kappa = 1;
  double log_tau = 0, tau = 0;
  double theta = 0;

  double log_mu(int j) const { return log_mu0 - j * log_kappa; }
  double log_eta(int j) const { return log_eta0 + j * log_kappa; }
};

// Results are natural logarithms of the integrals.
double mu0(const PeriodicPotential& pot, double sigma, double nu, const CriticalPoints& cp,
           const QuadratureOptions& opt = {});
double eta0(const PeriodicPotential& pot, double sigma, double nu, const CriticalPoints& cp,
            const QuadratureOptions& opt = {});
double laplace_mu0(const PeriodicPotential& pot, double sigma, double nu, const CriticalPoints& cp);
double laplace_eta0(const PeriodicPotential& pot, double sigma, double nu, const CriticalPoints& cp);

double theta(const AsymptoticScalars& s);
// tau * mu0 * eta0 / nu^2 - 1 with plain products; only valid where they are representable.
double theta_direct(const AsymptoticScalars& s);

AsymptoticScalars compute_scalars(const PeriodicPotential& pot, double sigma, double nu);

// gamma_j = gamma / mu_j restricted to J_j = (Q_{j-1}, Q_j).
class LocalEquilibrium {
 public:
  LocalEquilibrium(int j, const AsymptoticScalars& s, const GibbsEvaluator& g);
  double operator()(double p) const;
  double log_value(double p) const;  // -inf outside J_j
  double lower() const { return lo_; }
  double upper() const { return hi_; }
  int index() const { return j_; }

 private:
  int j_;
  double lo_, hi_, log_norm_;
  GibbsEvaluator g_;
};

LocalEquilibrium local_equilibrium(int j, const AsymptoticScalars& s, const GibbsEvaluator& g);

}  // namespace fpmass
