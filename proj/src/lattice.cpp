#include "fpmass/lattice.hpp"

#include <algorithm>
#include <cmath>

#include "fpmass/errors.hpp"

namespace fpmass {

Direction direction_for_sigma(double sigma) {
  if (sigma > 0) return Direction::Right;
  if (sigma < 0) return Direction::Left;
  return Direction::Symmetric;
}

double LatticeMassState::window_mass() const {
  double s = 0;
  for (double x : m) s += x;
  return s;
}

LatticeRates rhs(const LatticeMassState& s, double kappa) {
  const int n = static_cast<int>(s.m.size());
  LatticeRates r;
  r.dm.assign(n, 0.0);
  double right = 1.0, left = 0.0;
  if (s.dir == Direction::Left) { right = 0.0; left = 1.0; }
  if (s.dir == Direction::Symmetric) left = kappa;
  for (int i = 0; i < n; ++i) {
    const double out = (right + left) * s.m[i];
    r.dm[i] -= out;
    if (i + 1 < n) r.dm[i + 1] += right * s.m[i]; else r.d_sink_right += right * s.m[i];
    if (i > 0) r.dm[i - 1] += left * s.m[i]; else r.d_sink_left += left * s.m[i];
  }
  return r;
}

double poisson_kernel(double t, int j) {
  if (j < 0) return 0.0;
  if (t == 0.0) return j == 0 ? 1.0 : 0.0;
  return std::exp(j * std::log(t) - t - std::lgamma(j + 1.0));
}

double fundamental_solution(double t, int dj, double r2, int dim) {
  double k = poisson_kernel(t, dj);
  if (dim > 0) k *= heat_kernel(t, r2, dim);
  return k;
}

int window_radius(double T) { return static_cast<int>(std::ceil(T + 10.0 * std::sqrt(T + 1.0))); }

namespace {

LatticeMassState exact_at(const LatticeMassState& s0, double t) {
  LatticeMassState s = s0;
  const int n = static_cast<int>(s0.m.size());
  const int sign = s0.dir == Direction::Right ? 1 : -1;
  std::vector<double> K(n);
  for (int d = 0; d < n; ++d) K[d] = poisson_kernel(t, d);
  for (int i = 0; i < n; ++i) {
    double acc = 0;
    for (int k = 0; k < n; ++k) {
      const int d = sign * (i - k);
      if (d >= 0) acc += s0.m[k] * K[d];
    }
    s.m[i] = acc;
  }
  // everything not in the window went to the downstream sink
  const double lost = s0.window_mass() - s.window_mass();
  if (sign > 0) s.sink_right += lost; else s.sink_left += lost;
  return s;
}

void rk4_step(LatticeMassState& s, double dt) {
  auto add = [](const LatticeMassState& a, const LatticeRates& r, double c) {
    LatticeMassState b = a;
    for (std::size_t i = 0; i < b.m.size(); ++i) b.m[i] += c * r.dm[i];
    b.sink_left += c * r.d_sink_left;
    b.sink_right += c * r.d_sink_right;
    return b;
  };
  const LatticeRates k1 = rhs(s, s.kappa);
  const LatticeRates k2 = rhs(add(s, k1, 0.5 * dt), s.kappa);
  const LatticeRates k3 = rhs(add(s, k2, 0.5 * dt), s.kappa);
  const LatticeRates k4 = rhs(add(s, k3, dt), s.kappa);
  for (std::size_t i = 0; i < s.m.size(); ++i)
    s.m[i] += dt / 6.0 * (k1.dm[i] + 2 * k2.dm[i] + 2 * k3.dm[i] + k4.dm[i]);
  s.sink_left += dt / 6.0 * (k1.d_sink_left + 2 * k2.d_sink_left + 2 * k3.d_sink_left + k4.d_sink_left);
  s.sink_right += dt / 6.0 * (k1.d_sink_right + 2 * k2.d_sink_right + 2 * k3.d_sink_right + k4.d_sink_right);
}

}  // namespace

LatticeTrajectory integrate(const LatticeMassState& s0, double T, LatticeMethod method, double cadence) {
  if (T < 0) throw ConfigError("final time must be nonnegative");
  if (method == LatticeMethod::ExactPoisson && s0.dir == Direction::Symmetric)
    throw MethodError("the Poisson convolution only covers one-directional transport");
  for (double x : s0.m)
    if (x < 0) throw ConfigError("lattice masses must be nonnegative");
  LatticeTrajectory tr;
  tr.times.push_back(0.0);
  tr.states.push_back(s0);
  if (T == 0.0) return tr;
  if (!(cadence > 0)) cadence = T;
  const long n_out = static_cast<long>(std::ceil(T / cadence - 1e-9));
  const double dt_nominal = std::min(0.01, T / 100.0);
  LatticeMassState cur = s0;
  double t = 0;
  for (long k = 1; k <= n_out; ++k) {
    const double t_next = std::min(T, k * cadence);
    if (method == LatticeMethod::ExactPoisson) {
      cur = exact_at(s0, t_next);
    } else {
      const long steps = std::max(1L, static_cast<long>(std::ceil((t_next - t) / dt_nominal - 1e-9)));
      const double dt = (t_next - t) / steps;
      for (long i = 0; i < steps; ++i) rk4_step(cur, dt);
    }
    t = t_next;
    tr.times.push_back(t);
    tr.states.push_back(cur);
  }
  return tr;
}

double compare_l1(const std::vector<WellSeries>& pde, const std::vector<WellSeries>& lattice,
                  const std::vector<double>& pde_times, const std::vector<double>& lattice_times) {
  if (pde.size() != pde_times.size() || lattice.size() != lattice_times.size() ||
      pde_times.size() != lattice_times.size())
    throw GridMismatchError("time series lengths differ");
  for (std::size_t k = 0; k < pde_times.size(); ++k)
    if (std::abs(pde_times[k] - lattice_times[k]) > 1e-9 * std::max(1.0, std::abs(pde_times[k])))
      throw GridMismatchError("time grids differ");
  std::vector<double> err(pde.size(), 0.0);
  for (std::size_t k = 0; k < pde.size(); ++k) {
    const int lo = std::min(pde[k].j_min, lattice[k].j_min);
    const int hi = std::max(pde[k].j_max(), lattice[k].j_max());
    for (int j = lo; j <= hi; ++j) err[k] += std::abs(pde[k].at(j) - lattice[k].at(j));
  }
  double s = 0;
  for (std::size_t k = 1; k < err.size(); ++k) s += 0.5 * (err[k] + err[k - 1]) * (pde_times[k] - pde_times[k - 1]);
  return s;
}

std::vector<WellSeries> to_series(const LatticeTrajectory& tr) {
  std::vector<WellSeries> out;
  for (const auto& s : tr.states) out.push_back(WellSeries{s.j_min, s.m});
  return out;
}

}  // namespace fpmass
