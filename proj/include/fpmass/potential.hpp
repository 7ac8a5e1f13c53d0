#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace fpmass {

struct PotentialFunctions {
  std::function<double(double)> value, d1, d2, d3;
};

// Periodic part H of the energy landscape, with derivatives up to third order.
// H' must be unimodal on one period.
class PeriodicPotential {
 public:
  PeriodicPotential(PotentialFunctions f, double period, std::string kind);

  double operator()(double p) const { return f_->value(p); }
  double d1(double p) const { return f_->d1(p); }
  double d2(double p) const { return f_->d2(p); }
  double d3(double p) const { return f_->d3(p); }
  double effective(double p, double sigma) const { return f_->value(p) - sigma * p; }

  double period() const { return period_; }
  double sigma_lo() const { return sigma_lo_; }  // min H'
  double sigma_hi() const { return sigma_hi_; }  // max H'
  double argmax_d1() const { return argmax_d1_; }
  double zeta() const { return zeta_; }          // sup |H'''|
  const std::string& kind() const { return kind_; }

 private:
  std::shared_ptr<const PotentialFunctions> f_;
  double period_;
  std::string kind_;
  double sigma_lo_ = 0, sigma_hi_ = 0, argmax_d1_ = 0, zeta_ = 0;
};

// H(p) = -A cos(2 pi p / L)
PeriodicPotential make_cosine(double amplitude = 1.0, double period = 6.283185307179586);

// H(p) = G(sin p) with G(s) = sum_k g[k] s^k, G' > 0 on [-1, 1]
PeriodicPotential make_g_of_sin(std::vector<double> g);

// Periodic quintic spline through samples H(p0 + k*L/N), k = 0..N-1.
PeriodicPotential make_tabulated(std::span<const double> p, std::span<const double> h, double period);
PeriodicPotential load_tabulated_csv(const std::filesystem::path& file, double period);

PeriodicPotential make_custom(PotentialFunctions f, double period, std::string kind = "custom");

enum class Regime { Subcritical, SupercriticalRight, SupercriticalLeft, Boundary };
Regime classify(const PeriodicPotential& pot, double sigma);

struct CriticalPoints {
  double sigma = 0;
  double p_min0 = 0;  // P_0
  double p_max0 = 0;  // Q_0, P_0 < Q_0 < P_0 + L
  double period = 0;
  double p_min(int j) const { return p_min0 + j * period; }
  double p_max(int j) const { return p_max0 + j * period; }
};

CriticalPoints find_critical_points(const PeriodicPotential& pot, double sigma);

struct KramersData {
  double h_left = 0;
  double h_right = 0;
  double c_k = 0;
  double barrier() const { return h_left < h_right ? h_left : h_right; }
  double log_tau(double nu) const;
  double tau_of(double nu) const;
};

KramersData barriers(const PeriodicPotential& pot, double sigma, const CriticalPoints& cp);
double tau(const KramersData& kd, double nu);

}  // namespace fpmass
