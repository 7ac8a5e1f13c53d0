#include "fpmass/weights.hpp"

#include <algorithm>
#include <cmath>

#include "fpmass/errors.hpp"

namespace fpmass {

CumulativeTable::CumulativeTable(double a, double b, std::function<double(double)> log_density, double log_norm,
                                 int nodes)
    : a_(a), b_(b), log_norm_(log_norm), log_density_(std::move(log_density)) {
  if (!(b > a) || nodes < 2) throw ConfigError("invalid cumulative table range");
  const int n = nodes;
  dx_ = (b_ - a_) / n;
  x_.resize(n + 1);
  y_.resize(n + 1);
  m_.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    x_[k] = k == n ? b_ : a_ + k * dx_;
    m_[k] = std::exp(log_density_(x_[k]) - log_norm_);
  }
  auto f = [&](double p) { return std::exp(log_density_(p) - log_norm_); };
  y_[0] = 0.0;
  for (int k = 0; k < n; ++k) y_[k + 1] = y_[k] + detail::gl15(f, x_[k], x_[k + 1]);
  raw_total_ = y_[n];
  if (!(raw_total_ > 0) || !std::isfinite(raw_total_)) throw QuadratureError("weight table has no mass");
  for (auto& v : y_) v /= raw_total_;
  for (auto& v : m_) v /= raw_total_;
  log_norm_ += std::log(raw_total_);
  y_[n] = 1.0;
  // Fritsch-Carlson limiting; a no-op where the exact slopes are already consistent.
  for (int k = 0; k < n; ++k) {
    double delta = (y_[k + 1] - y_[k]) / (x_[k + 1] - x_[k]);
    if (delta <= 0) {
      m_[k] = m_[k + 1] = 0;
      continue;
    }
    double al = m_[k] / delta, be = m_[k + 1] / delta;
    double r = al * al + be * be;
    if (r > 9.0) {
      double t = 3.0 / std::sqrt(r);
      m_[k] = t * al * delta;
      m_[k + 1] = t * be * delta;
    }
  }
}

double CumulativeTable::value(double p) const {
  if (p <= a_) return 0.0;
  if (p >= b_) return 1.0;
  const int n = static_cast<int>(x_.size()) - 1;
  int k = std::min(n - 1, static_cast<int>((p - a_) / dx_));
  const double h = x_[k + 1] - x_[k];
  const double t = (p - x_[k]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t, h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  double v = h00 * y_[k] + h10 * h * m_[k] + h01 * y_[k + 1] + h11 * h * m_[k + 1];
  return std::clamp(v, 0.0, 1.0);
}

double CumulativeTable::derivative(double p) const {
  if (p < a_ || p >= b_) return 0.0;  // half-open, so neighbouring tables do not overlap
  return std::exp(log_density_(p) - log_norm_);
}

namespace {

int psi_nodes(const AsymptoticScalars& s, int min_nodes) {
  return std::max(min_nodes, static_cast<int>(std::ceil(s.cp.period / (s.nu / 40.0))));
}

}  // namespace

PsiTable::PsiTable(const AsymptoticScalars& s, const GibbsEvaluator& g, int min_nodes)
    : CumulativeTable(
          s.cp.p_min(0), s.cp.p_min(1), [g](double p) { return -g.log_gamma(p); }, s.log_eta0,
          psi_nodes(s, min_nodes)) {
  if (std::abs(raw_total() - 1.0) > 1e-8) throw QuadratureError("psi table does not integrate to one");
}

WeightPsi build_psi(int j, std::shared_ptr<const PsiTable> table, double period) {
  return WeightPsi(j, std::move(table), period);
}

WeightPsi build_psi(int j, const AsymptoticScalars& s, const GibbsEvaluator& g) {
  return WeightPsi(j, std::make_shared<const PsiTable>(s, g), s.cp.period);
}

WeightPhi::WeightPhi(std::shared_ptr<const PsiTable> t, const CriticalPoints& cp, int j_min, int j_max)
    : t_(std::move(t)), cp_(cp), j_min_(j_min), j_max_(j_max) {
  if (j_max < j_min) throw WindowError("empty phi window");
}

double WeightPhi::operator()(double p) const {
  const double eps = 1e-12 * cp_.period;
  if (p < lower() - eps || p > upper() + eps) throw WindowError("phi evaluated outside its well window");
  const double L = cp_.period;
  // psi_j = 1 for j < j_min, 0 for j > j_max on this range
  double acc = std::max(0, j_min_) - std::max(0, -1 - j_max_);
  const int k = static_cast<int>(std::floor((p - cp_.p_min0) / L));
  for (int j = std::max(j_min_, k - 1); j <= std::min(j_max_, k + 1); ++j) {
    double v = t_->value(p - j * L);
    acc += j >= 0 ? v : v - 1.0;
  }
  // ψ_j saturated to 1 (j < k - 1) or 0 (j > k + 1) inside the window
  for (int j = j_min_; j < std::min(k - 1, j_max_ + 1); ++j) acc += j >= 0 ? 1.0 : 0.0;
  for (int j = std::max(k + 2, j_min_); j <= j_max_; ++j) acc += j >= 0 ? 0.0 : -1.0;
  return acc;
}

double WeightPhi::derivative(double p) const {
  const double L = cp_.period;
  const int k = static_cast<int>(std::floor((p - cp_.p_min0) / L));
  double acc = 0;
  for (int j = std::max(j_min_, k - 1); j <= std::min(j_max_, k + 1); ++j) acc += t_->derivative(p - j * L);
  return acc;
}

WeightPhi build_phi(const AsymptoticScalars& s, const GibbsEvaluator& g, int j_min, int j_max) {
  return WeightPhi(std::make_shared<const PsiTable>(s, g), s.cp, j_min, j_max);
}

std::vector<InnerInterval> inner_intervals(const CriticalPoints& cp, const PeriodicPotential& pot, double sigma,
                                           int j_min, int j_max) {
  auto heff = [&](double p) { return pot.effective(p, sigma); };
  auto level_root = [&](double a, double b, double level) {
    // heff - level changes sign on [a, b] and is monotone there
    double fa = heff(a) - level, fb = heff(b) - level;
    if (fa * fb > 0) throw DegenerateError("inner interval bracketing failed");
    for (int it = 0; it < 200 && b - a > 1e-15 * (1 + std::abs(a)); ++it) {
      double m = 0.5 * (a + b), fm = heff(m) - level;
      if ((fm > 0) == (fa > 0)) { a = m; fa = fm; } else { b = m; }
    }
    return 0.5 * (a + b);
  };
  std::vector<InnerInterval> out;
  for (int j = j_min; j <= j_max; ++j) {
    double P = cp.p_min(j), Ql = cp.p_max(j - 1), Qr = cp.p_max(j);
    double lo = level_root(Ql, P, 0.5 * (heff(Ql) + heff(P)));
    double hi = level_root(P, Qr, 0.5 * (heff(Qr) + heff(P)));
    out.push_back({j, lo, hi});
  }
  return out;
}

double outer_local_mass(int j, const AsymptoticScalars& s, const GibbsEvaluator& g, const InnerInterval& I) {
  LocalEquilibrium gj(j, s, g);
  QuadratureOptions opt;
  opt.abs_tol = 1e-300;
  return integrate(gj, gj.lower(), I.lower, opt) + integrate(gj, I.upper, gj.upper(), opt);
}

double inner_psi_sup(const WeightPsi& psi_j, const WeightPsi& psi_jm1, const InnerInterval& I) {
  // psi_j vanishes left of P_j and 1 - psi_{j-1} vanishes right of it; each is monotone on I_j.
  return std::max(psi_j(I.upper), 1.0 - psi_jm1(I.lower));
}

}  // namespace fpmass
