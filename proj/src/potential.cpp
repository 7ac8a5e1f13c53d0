#include "fpmass/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "fpmass/errors.hpp"

namespace fpmass {

namespace {

constexpr int kScan = 256;

double golden_max(const std::function<double(double)>& f, double a, double b) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && b - a > 1e-15 * (1.0 + std::abs(a)); ++it) {
    if (fc > fd) {
      b = d; d = c; fd = fc;
      c = b - g * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + g * (b - a); fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Returns argmax of f over one period starting at 0.
double periodic_argmax(const std::function<double(double)>& f, double L) {
  const double h = L / kScan;
  int best = 0;
  double fb = f(0.0);
  for (int k = 1; k < kScan; ++k) {
    double v = f(k * h);
    if (v > fb) { fb = v; best = k; }
  }
  return golden_max(f, (best - 1) * h, (best + 1) * h);
}

}  // namespace

PeriodicPotential::PeriodicPotential(PotentialFunctions f, double period, std::string kind)
    : f_(std::make_shared<const PotentialFunctions>(std::move(f))), period_(period), kind_(std::move(kind)) {
  if (!(period > 0.0) || !std::isfinite(period)) throw ConfigError("period must be positive");
  const auto& F = *f_;
  argmax_d1_ = periodic_argmax(F.d1, period_);
  sigma_hi_ = F.d1(argmax_d1_);
  sigma_lo_ = F.d1(periodic_argmax([&](double p) { return -F.d1(p); }, period_));
  double z1 = std::abs(F.d3(periodic_argmax(F.d3, period_)));
  double z2 = std::abs(F.d3(periodic_argmax([&](double p) { return -F.d3(p); }, period_)));
  zeta_ = std::max(z1, z2);
  if (!(sigma_lo_ < sigma_hi_)) throw DegenerateError("H' is constant");

  // H' unimodal: H'' changes sign exactly twice per period.
  const int n = 1024;
  int changes = 0;
  double prev = F.d2((n - 0.5) * period_ / n);
  for (int k = 0; k < n; ++k) {
    double cur = F.d2((k + 0.5) * period_ / n);
    if ((cur > 0) != (prev > 0)) ++changes;
    prev = cur;
  }
  if (changes != 2) throw DegenerateError("H' is not unimodal on one period");
}

PeriodicPotential make_custom(PotentialFunctions f, double period, std::string kind) {
  return PeriodicPotential(std::move(f), period, std::move(kind));
}

PeriodicPotential make_cosine(double A, double L) {
  if (!(A > 0)) throw ConfigError("cosine amplitude must be positive");
  const double k = 2.0 * std::numbers::pi / L;
  PotentialFunctions f{
      [=](double p) { return -A * std::cos(k * p); },
      [=](double p) { return A * k * std::sin(k * p); },
      [=](double p) { return A * k * k * std::cos(k * p); },
      [=](double p) { return -A * k * k * k * std::sin(k * p); }};
  return PeriodicPotential(std::move(f), L, "cosine");
}

PeriodicPotential make_g_of_sin(std::vector<double> g) {
  if (g.size() < 2) throw ConfigError("g_of_sin needs at least a linear coefficient");
  auto G = [g](double s, int der) {
    double acc = 0.0, sp = 1.0;
    for (std::size_t k = der; k < g.size(); ++k) {
      double c = g[k];
      for (int m = 0; m < der; ++m) c *= static_cast<double>(k - m);
      acc += c * sp;
      sp *= s;
    }
    return acc;
  };
  for (int i = 0; i <= 2000; ++i) {
    double s = -1.0 + i * 1e-3;
    if (!(G(s, 1) > 0)) throw ConfigError("g_of_sin: G must be strictly increasing on [-1, 1]");
  }
  PotentialFunctions f{
      [=](double p) { return G(std::sin(p), 0); },
      [=](double p) { return G(std::sin(p), 1) * std::cos(p); },
      [=](double p) {
        double s = std::sin(p), c = std::cos(p);
        return G(s, 2) * c * c - G(s, 1) * s;
      },
      [=](double p) {
        double s = std::sin(p), c = std::cos(p);
        return G(s, 3) * c * c * c - 3.0 * G(s, 2) * s * c - G(s, 1) * c;
      }};
  return PeriodicPotential(std::move(f), 2.0 * std::numbers::pi, "g_of_sin");
}

namespace {

// Centered cardinal B-spline of degree n.
double bspline(int n, double x) {
  if (n == 0) return (x >= -0.5 && x < 0.5) ? 1.0 : 0.0;
  const double r = 0.5 * (n + 1);
  if (x <= -r || x >= r) return 0.0;
  return ((x + r) * bspline(n - 1, x + 0.5) + (r - x) * bspline(n - 1, x - 0.5)) / n;
}

struct QuinticSpline {
  double p0, h, L;
  int n;
  std::vector<std::vector<double>> diffs;  // k-th backward difference of the coefficients

  double eval(double p, int der) const {
    double x = (p - p0) / h;
    x -= n * std::floor(x / n);
    const int base = static_cast<int>(std::floor(x));
    const auto& d = diffs[der];
    const double shift = 0.5 * der;
    double acc = 0.0;
    for (int i = base - 3; i <= base + 4; ++i) {
      double b = bspline(5 - der, x - i + shift);
      if (b != 0.0) acc += d[((i % n) + n) % n] * b;
    }
    return acc / std::pow(h, der);
  }
};

}  // namespace

PeriodicPotential make_tabulated(std::span<const double> p, std::span<const double> hv, double L) {
  if (p.size() != hv.size() || p.size() < 8) throw ConfigError("table potential needs at least 8 (p, H) rows");
  std::size_t n = p.size();
  const double step = (p[n - 1] - p[0]) / (n - 1);
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(p[i] - p[i - 1] - step) > 1e-9 * std::abs(step)) throw ConfigError("table potential grid must be uniform");
  double covered = p[n - 1] - p[0];
  if (covered + step < L * (1 - 1e-9)) throw ConfigError("table does not cover one period");
  int N = static_cast<int>(std::lround(L / step));
  if (std::abs(N * step - L) > 1e-9 * L) throw ConfigError("table spacing does not divide the period");
  if (static_cast<std::size_t>(N) > n) throw ConfigError("table does not cover one period");
  std::vector<double> y(hv.begin(), hv.begin() + N);

  // (d[i-2] + 26 d[i-1] + 66 d[i] + 26 d[i+1] + d[i+2]) / 120 = y[i]
  std::vector<double> d = y, nd(N);
  auto at = [&](const std::vector<double>& v, int i) { return v[((i % N) + N) % N]; };
  double scale = 0;
  for (double v : y) scale = std::max(scale, std::abs(v));
  for (int it = 0; it < 2000; ++it) {
    double delta = 0;
    for (int i = 0; i < N; ++i) {
      double off = at(d, i - 2) + 26 * at(d, i - 1) + 26 * at(d, i + 1) + at(d, i + 2);
      nd[i] = (120 * y[i] - off) / 66.0;
      delta = std::max(delta, std::abs(nd[i] - d[i]));
    }
    d.swap(nd);
    if (delta <= 1e-15 * (1 + scale)) break;
  }
  auto spline = std::make_shared<QuinticSpline>();
  spline->p0 = p[0];
  spline->h = step;
  spline->L = L;
  spline->n = N;
  spline->diffs.push_back(d);
  for (int k = 1; k <= 3; ++k) {
    const auto& prev = spline->diffs.back();
    std::vector<double> nxt(N);
    for (int i = 0; i < N; ++i) nxt[i] = prev[i] - prev[(i - 1 + N) % N];
    spline->diffs.push_back(std::move(nxt));
  }
  PotentialFunctions f{[spline](double q) { return spline->eval(q, 0); },
                       [spline](double q) { return spline->eval(q, 1); },
                       [spline](double q) { return spline->eval(q, 2); },
                       [spline](double q) { return spline->eval(q, 3); }};
  return PeriodicPotential(std::move(f), L, "table");
}

PeriodicPotential load_tabulated_csv(const std::filesystem::path& file, double period) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open potential table " + file.string());
  std::vector<double> p, h;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double a, b;
    if (!(ss >> a >> b)) continue;  // header
    p.push_back(a);
    h.push_back(b);
  }
  return make_tabulated(p, h, period);
}

Regime classify(const PeriodicPotential& pot, double sigma) {
  const double margin = 1e-9 * (pot.sigma_hi() - pot.sigma_lo());
  if (sigma > pot.sigma_lo() + margin && sigma < pot.sigma_hi() - margin) return Regime::Subcritical;
  if (sigma > pot.sigma_hi() + margin) return Regime::SupercriticalRight;
  if (sigma < pot.sigma_lo() - margin) return Regime::SupercriticalLeft;
  return Regime::Boundary;
}

CriticalPoints find_critical_points(const PeriodicPotential& pot, double sigma) {
  if (classify(pot, sigma) != Regime::Subcritical) throw RegimeError("sigma outside the subcritical interval");
  const double L = pot.period();
  const double start = pot.argmax_d1();  // f > 0 here
  auto f = [&](double p) { return pot.d1(p) - sigma; };
  const double h = L / kScan;
  std::vector<std::pair<double, double>> down, up;  // sign + -> -, - -> +
  double a = start, fa = f(a);
  for (int k = 1; k <= kScan; ++k) {
    double b = start + k * h;
    double fb = k == kScan ? f(start) : f(b);
    if (fa > 0 && fb <= 0) down.emplace_back(a, b);
    if (fa <= 0 && fb > 0) up.emplace_back(a, b);
    a = b;
    fa = fb;
  }
  if (down.size() != 1 || up.size() != 1) throw DegenerateError("expected exactly one minimum and one maximum per period");

  auto solve = [&](std::pair<double, double> br) {
    double lo = br.first, hi = br.second;
    const bool rising = f(lo) <= 0;
    while (hi - lo > 1e-14) {
      double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      bool pos = f(mid) > 0;
      if (pos == rising) hi = mid; else lo = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 2; ++it) {
      double d = pot.d2(x);
      if (d == 0) break;
      double nx = x - f(x) / d;
      if (std::abs(nx - x) < 4 * h) x = nx;
    }
    return x;
  };
  double P = solve(up[0]);
  double Q = solve(down[0]);
  P -= L * std::round(P / L);
  Q -= L * std::floor((Q - P) / L);
  if (Q - P < 1e-8 * L || P + L - Q < 1e-8 * L) throw DegenerateError("critical points coalesce");
  if (!(pot.d2(P) > 0 && pot.d2(Q) < 0)) throw DegenerateError("degenerate critical point");
  return CriticalPoints{sigma, P, Q, L};
}

KramersData barriers(const PeriodicPotential& pot, double sigma, const CriticalPoints& cp) {
  const double L = pot.period();
  const double hp = pot.effective(cp.p_min0, sigma);
  KramersData kd;
  kd.h_right = pot.effective(cp.p_max0, sigma) - hp;
  kd.h_left = pot(cp.p_max0) - sigma * (cp.p_max0 - L) - hp;
  kd.c_k = std::sqrt(std::abs(pot.d2(cp.p_min0) * pot.d2(cp.p_max0))) / (2.0 * std::numbers::pi);
  return kd;
}

double KramersData::log_tau(double nu) const {
  if (!(nu > 0)) throw ConfigError("nu must be positive");
  return std::log(c_k) - barrier() / (nu * nu);
}

double KramersData::tau_of(double nu) const {
  double lt = log_tau(nu);
  if (lt < -700.0) throw ScaleError("Kramers time underflows; nu too small for the barrier");
  return std::exp(lt);
}

double tau(const KramersData& kd, double nu) { return kd.tau_of(nu); }

}  // namespace fpmass
