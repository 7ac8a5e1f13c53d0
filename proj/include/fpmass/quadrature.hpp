#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "fpmass/errors.hpp"

namespace fpmass {

struct QuadratureOptions {
  double rel_tol = 1e-13;
  double abs_tol = 0.0;
  int max_depth = 40;
  int initial_panels = 8;
};

struct GaussRule {
  std::array<double, 15> x;  // nodes on [-1, 1]
  std::array<double, 15> w;
};

const GaussRule& gauss_legendre_15();

namespace detail {

template <class F>
double gl15(F& f, double a, double b) {
  const GaussRule& r = gauss_legendre_15();
  const double c = 0.5 * (a + b), s = 0.5 * (b - a);
  double acc = 0.0;
  for (int k = 0; k < 15; ++k) acc += r.w[k] * f(c + s * r.x[k]);
  return acc * s;
}

template <class F>
double refine(F& f, double a, double b, double whole, double tol, double floor, int depth, int max_depth) {
  const double m = 0.5 * (a + b);
  const double left = gl15(f, a, m), right = gl15(f, m, b);
  const double both = left + right;
  if (std::abs(both - whole) <= std::max({tol, 64 * 2.2e-16 * std::abs(both), floor})) return both;
  if (depth >= max_depth) throw QuadratureError("adaptive quadrature did not converge");
  return refine(f, a, m, left, 0.5 * tol, floor, depth + 1, max_depth) +
         refine(f, m, b, right, 0.5 * tol, floor, depth + 1, max_depth);
}

}  // namespace detail

// Adaptive composite 15-point Gauss-Legendre with bisection.
template <class F>
double integrate(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
  if (a == b) return 0.0;
  if (!(std::isfinite(a) && std::isfinite(b))) throw QuadratureError("infinite integration limits");
  const int n = opt.initial_panels;
  if (n < 1 || n > 64) throw ConfigError("initial_panels must lie in [1, 64]");
  const double w = (b - a) / n;
  std::array<double, 64> part{};
  double total = 0.0, total_abs = 0.0;
  for (int i = 0; i < n; ++i) {
    part[i] = detail::gl15(f, a + i * w, i + 1 == n ? b : a + (i + 1) * w);
    total += part[i];
    total_abs += std::abs(part[i]);
  }
  if (!std::isfinite(total)) throw QuadratureError("non-finite integrand");
  const double tol = std::max(opt.abs_tol, opt.rel_tol * total_abs);
  if (tol == 0.0) return 0.0;
  // below this a panel difference is roundoff in the total, not truncation
  const double floor = 2.2e-16 * total_abs;
  double out = 0.0;
  for (int i = 0; i < n; ++i)
    out += detail::refine(f, a + i * w, i + 1 == n ? b : a + (i + 1) * w, part[i], tol / n, floor, 1,
                          opt.max_depth);
  return out;
}

}  // namespace fpmass
