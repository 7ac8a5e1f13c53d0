#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "fpmass/asymptotics.hpp"

namespace fpmass {

// Monotone map from 0 at a to 1 at b with derivative exp(log_density) / (its integral).
// Cumulative Gauss-Legendre sums on a uniform mesh, cubic Hermite with exact slopes in between.
class CumulativeTable {
 public:
  CumulativeTable(double a, double b, std::function<double(double)> log_density, double log_norm, int nodes);
  double value(double p) const;       // saturates outside [a, b]
  double derivative(double p) const;  // 0 outside [a, b)
  double lower() const { return a_; }
  double upper() const { return b_; }
  std::size_t size() const { return x_.size(); }
  double raw_total() const { return raw_total_; }  // integral before renormalization

 private:
  double a_, b_, dx_, log_norm_, raw_total_ = 0;
  std::function<double(double)> log_density_;
  std::vector<double> x_, y_, m_;
};

// psi_0 on K_0 = (P_0, P_1): cumulative integral of 1/(eta_0 gamma).
class PsiTable : public CumulativeTable {
 public:
  PsiTable(const AsymptoticScalars& s, const GibbsEvaluator& g, int min_nodes = 1024);
};

class WeightPsi {
 public:
  WeightPsi(int j, std::shared_ptr<const PsiTable> t, double period) : j_(j), t_(std::move(t)), L_(period) {}
  double operator()(double p) const { return t_->value(p - j_ * L_); }
  double derivative(double p) const { return t_->derivative(p - j_ * L_); }
  int index() const { return j_; }
  const PsiTable& table() const { return *t_; }

 private:
  int j_;
  std::shared_ptr<const PsiTable> t_;
  double L_;
};

WeightPsi build_psi(int j, const AsymptoticScalars& s, const GibbsEvaluator& g);
WeightPsi build_psi(int j, std::shared_ptr<const PsiTable> table, double period);

// phi = sum_{j>=0} psi_j - sum_{j<0} (1 - psi_j), evaluated on [P_{j_min}, P_{j_max+1}].
class WeightPhi {
 public:
  WeightPhi(std::shared_ptr<const PsiTable> t, const CriticalPoints& cp, int j_min, int j_max);
  double operator()(double p) const;
  double derivative(double p) const;
  double lower() const { return cp_.p_min(j_min_); }
  double upper() const { return cp_.p_min(j_max_ + 1); }

 private:
  std::shared_ptr<const PsiTable> t_;
  CriticalPoints cp_;
  int j_min_, j_max_;
};

WeightPhi build_phi(const AsymptoticScalars& s, const GibbsEvaluator& g, int j_min, int j_max);

struct InnerInterval {
  int j;
  double lower, upper;  // R_j below P_j and above P_j at half-barrier energy
};

std::vector<InnerInterval> inner_intervals(const CriticalPoints& cp, const PeriodicPotential& pot, double sigma,
                                           int j_min, int j_max);

// int over J_j minus I_j of gamma_j
double outer_local_mass(int j, const AsymptoticScalars& s, const GibbsEvaluator& g, const InnerInterval& I);
// sup over I_j of psi_j + |1 - psi_{j-1}|
double inner_psi_sup(const WeightPsi& psi_j, const WeightPsi& psi_jm1, const InnerInterval& I);

}  // namespace fpmass
