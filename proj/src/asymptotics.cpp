#include "fpmass/asymptotics.hpp"

#include <limits>
#include <numbers>

namespace fpmass {

namespace {

// log of int_a^b exp(g(p)) dp, with g maximal at `peak` inside [a, b].
template <class G>
double log_peaked_integral(G g, double a, double peak, double b, const QuadratureOptions& opt) {
  const double shift = g(peak);
  auto f = [&](double p) { return std::exp(g(p) - shift); };
  double v = integrate(f, a, peak, opt) + integrate(f, peak, b, opt);
  return shift + std::log(v);
}

}  // namespace

double mu0(const PeriodicPotential& pot, double sigma, double nu, const CriticalPoints& cp,
           const QuadratureOptions& opt) {
  GibbsEvaluator g(pot, sigma, nu);
  return log_peaked_integral([&](double p) { return g.log_gamma(p); }, cp.p_max(-1), cp.p_min(0), cp.p_max(0), opt);
}

double eta0(const PeriodicPotential& pot, double sigma, double nu, const CriticalPoints& cp,
            const QuadratureOptions& opt) {
  GibbsEvaluator g(pot, sigma, nu);
  return log_peaked_integral([&](double p) { return -g.log_gamma(p); }, cp.p_min(0), cp.p_max(0), cp.p_min(1), opt);
}

double laplace_mu0(const PeriodicPotential& pot, double sigma, double nu, const CriticalPoints& cp) {
  const double P = cp.p_min0;
  return std::log(nu * std::sqrt(2 * std::numbers::pi) / std::sqrt(std::abs(pot.d2(P)))) +
         (-pot(P) + sigma * P) / (nu * nu);
}

double laplace_eta0(const PeriodicPotential& pot, double sigma, double nu, const CriticalPoints& cp) {
  const double Q = cp.p_max0;
  return std::log(nu * std::sqrt(2 * std::numbers::pi) / std::sqrt(std::abs(pot.d2(Q)))) -
         (-pot(Q) + sigma * Q) / (nu * nu);
}

double theta(const AsymptoticScalars& s) {
  return std::expm1(s.log_tau + s.log_mu0 + s.log_eta0 - 2.0 * std::log(s.nu));
}

double theta_direct(const AsymptoticScalars& s) {
  return std::exp(s.log_tau) * std::exp(s.log_mu0) * std::exp(s.log_eta0) / (s.nu * s.nu) - 1.0;
}

AsymptoticScalars compute_scalars(const PeriodicPotential& pot, double sigma, double nu) {
  if (!(nu > 0)) throw ConfigError("nu must be positive");
  AsymptoticScalars s;
  s.sigma = sigma;
  s.nu = nu;
  s.cp = find_critical_points(pot, sigma);
  s.kd = barriers(pot, sigma, s.cp);
  s.log_tau = s.kd.log_tau(nu);
  s.tau = s.kd.tau_of(nu);
  s.log_mu0 = mu0(pot, sigma, nu, s.cp);
  s.log_eta0 = eta0(pot, sigma, nu, s.cp);
  s.log_kappa = -sigma * pot.period() / (nu * nu);
  s.kappa = std::exp(s.log_kappa);
  s.theta = theta(s);
  return s;
}

LocalEquilibrium::LocalEquilibrium(int j, const AsymptoticScalars& s, const GibbsEvaluator& g)
    : j_(j), lo_(s.cp.p_max(j - 1)), hi_(s.cp.p_max(j)), log_norm_(s.log_mu(j)), g_(g) {}

double LocalEquilibrium::log_value(double p) const {
  if (p <= lo_ || p >= hi_) return -std::numeric_limits<double>::infinity();
  return g_.log_gamma(p) - log_norm_;
}

double LocalEquilibrium::operator()(double p) const {
  if (p <= lo_ || p >= hi_) return 0.0;
  return std::exp(g_.log_gamma(p) - log_norm_);
}

LocalEquilibrium local_equilibrium(int j, const AsymptoticScalars& s, const GibbsEvaluator& g) {
  return LocalEquilibrium(j, s, g);
}

}  // namespace fpmass
