#include "fpmass/sdemc.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fpmass/errors.hpp"
#include "fpmass/philox.hpp"

namespace fpmass {

double max_stable_dt(const PeriodicPotential& pot, double nu, double tau) {
  return 0.01 * tau * std::min(1.0, nu * nu / pot.zeta());
}

namespace {

struct Prepared {
  CriticalPoints cp;
  double p_start;
  std::uint64_t steps;
  std::vector<std::uint64_t> snap_steps;
  std::vector<double> snap_times;
};

Prepared prepare(const PeriodicPotential& pot, const McParams& prm) {
  if (prm.n_particles < 1) throw ConfigError("need at least one particle");
  if (prm.n_particles > 0xFFFFFFFFull) throw ConfigError("too many particles");
  if (!(prm.dt > 0) || !(prm.T >= 0) || !(prm.tau > 0) || !(prm.nu > 0)) throw ConfigError("invalid Monte-Carlo parameters");
  if (prm.dt > max_stable_dt(pot, prm.nu, prm.tau) * (1 + 1e-12))
    throw StabilityError("dt exceeds 0.01 tau min(1, nu^2/zeta)");
  Prepared p;
  // well positions only exist below the critical tilt; above it P_0 is replaced by 0
  if (classify(pot, prm.sigma) == Regime::Subcritical) {
    p.cp = find_critical_points(pot, prm.sigma);
  } else {
    p.cp = CriticalPoints{prm.sigma, 0.0, 0.5 * pot.period(), pot.period()};
  }
  p.p_start = std::isnan(prm.p_start) ? p.cp.p_min0 : prm.p_start;
  p.steps = static_cast<std::uint64_t>(std::llround(prm.T / prm.dt));
  if (std::abs(static_cast<double>(p.steps) * prm.dt - prm.T) > 1e-9 * std::max(1.0, prm.T))
    throw ConfigError("T must be an integer multiple of dt");
  std::vector<double> times = prm.snapshot_times;
  std::sort(times.begin(), times.end());
  for (double t : times) {
    if (t < 0 || t > prm.T * (1 + 1e-12)) throw ConfigError("snapshot time outside [0, T]");
    p.snap_steps.push_back(static_cast<std::uint64_t>(std::llround(t / prm.dt)));
    p.snap_times.push_back(static_cast<double>(p.snap_steps.back()) * prm.dt);
  }
  return p;
}

void sort_hops(std::vector<Hop>& h) {
  std::stable_sort(h.begin(), h.end(), [](const Hop& a, const Hop& b) {
    return a.time < b.time || (a.time == b.time && a.particle < b.particle);
  });
}

}  // namespace

Ensemble simulate(const PeriodicPotential& pot, const McParams& prm, Execution ex) {
  const Prepared pr = prepare(pot, prm);
  if (prm.block < 1 || prm.block > 1024) throw ConfigError("block size must be in [1, 1024]");
  if (prm.table_cells < 64) throw ConfigError("drift table too coarse");
  const int nt = prm.table_cells;
  const double L = pot.period();
  std::vector<double> f(nt + 1), df(nt + 1);
  for (int i = 0; i <= nt; ++i) {
    const double p = i * L / nt;
    f[i] = prm.sigma - pot.d1(p);
    df[i] = -pot.d2(p) * (L / nt);
  }
  Ensemble e;
  e.seed = prm.seed;
  e.dt = prm.dt;
  e.steps = pr.steps;
  e.T = static_cast<double>(pr.steps) * prm.dt;
  e.cp = pr.cp;
  e.positions.assign(prm.n_particles, pr.p_start);
  e.snapshot_times = pr.snap_times;
  e.snapshots.assign(pr.snap_steps.size(), std::vector<double>(prm.n_particles));
  std::vector<double*> snap_ptr;
  for (auto& s : e.snapshots) snap_ptr.push_back(s.data());

  const PhiloxKey key = philox_key(prm.seed);
  detail::KernelSetup k{L,
                        1.0 / L,
                        pr.cp.p_min0,
                        prm.sigma,
                        prm.dt,
                        prm.dt / prm.tau,
                        std::sqrt(2.0 * prm.nu * prm.nu * prm.dt / prm.tau),
                        nt,
                        f.data(),
                        df.data(),
                        pr.steps,
                        key[0],
                        key[1],
                        pr.snap_steps.data(),
                        static_cast<int>(pr.snap_steps.size())};
  const std::uint64_t B = static_cast<std::uint64_t>(prm.block);
  const long n_blocks = static_cast<long>((prm.n_particles + B - 1) / B);
  std::vector<std::vector<Hop>> hops(n_blocks);
  auto work = [&](long b) {
    const std::uint64_t first = static_cast<std::uint64_t>(b) * B;
    const int count = static_cast<int>(std::min(B, prm.n_particles - first));
    detail::run_block(k, static_cast<std::uint32_t>(first), count, e.positions.data() + first, snap_ptr.data(),
                      hops[b]);
  };
  if (ex == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long b = 0; b < n_blocks; ++b) work(b);
  } else {
    for (long b = 0; b < n_blocks; ++b) work(b);
  }
  for (auto& h : hops) e.hops.insert(e.hops.end(), h.begin(), h.end());
  sort_hops(e.hops);
  return e;
}

Ensemble simulate_reference(const PeriodicPotential& pot, const McParams& prm) {
  const Prepared pr = prepare(pot, prm);
  const double L = pot.period(), P0 = pr.cp.p_min0;
  const double a = prm.dt / prm.tau, s = std::sqrt(2.0 * prm.nu * prm.nu * prm.dt / prm.tau);
  const PhiloxKey key = philox_key(prm.seed);
  Ensemble e;
  e.seed = prm.seed;
  e.dt = prm.dt;
  e.steps = pr.steps;
  e.T = static_cast<double>(pr.steps) * prm.dt;
  e.cp = pr.cp;
  e.positions.assign(prm.n_particles, pr.p_start);
  e.snapshot_times = pr.snap_times;
  e.snapshots.assign(pr.snap_steps.size(), std::vector<double>(prm.n_particles));
  for (std::uint64_t n = 0; n < prm.n_particles; ++n) {
    const auto id = static_cast<std::uint32_t>(n);
    double x = pr.p_start;
    std::int64_t home = std::llround((x - P0) / L);
    std::size_t snap = 0;
    auto take = [&](std::uint64_t step) {
      while (snap < pr.snap_steps.size() && pr.snap_steps[snap] == step) e.snapshots[snap++][n] = x;
    };
    take(0);
    NormalPair z{0, 0};
    for (std::uint64_t step = 0; step < pr.steps; ++step) {
      if ((step & 1u) == 0) z = normal_pair(id, step >> 1, key);
      const double xi = (step & 1u) == 0 ? z.z0 : z.z1;
      x += (prm.sigma - pot.d1(x)) * a + s * xi;
      const double hp = P0 + static_cast<double>(home) * L;
      int dir = x >= hp + L ? 1 : (x <= hp - L ? -1 : 0);
      if (dir != 0) {
        e.hops.push_back(Hop{id, static_cast<double>(step + 1) * prm.dt, home, home + dir});
        home += dir;
      }
      take(step + 1);
    }
    e.positions[n] = x;
  }
  sort_hops(e.hops);
  return e;
}

std::vector<WellSeries> occupation_histogram(const Ensemble& e, const CriticalPoints& cp) {
  std::vector<WellSeries> out;
  for (const auto& snap : e.snapshots) {
    std::map<long, double> counts;
    for (double p : snap) counts[static_cast<long>(std::floor((p - cp.p_max0) / cp.period)) + 1] += 1.0;
    WellSeries w;
    if (counts.empty()) {
      out.push_back(w);
      continue;
    }
    w.j_min = static_cast<int>(counts.begin()->first);
    w.v.assign(counts.rbegin()->first - counts.begin()->first + 1, 0.0);
    for (auto [j, c] : counts) w.v[j - w.j_min] = c / static_cast<double>(snap.size());
    out.push_back(std::move(w));
  }
  return out;
}

EscapeStatistics escape_statistics(const Ensemble& e, std::uint64_t n_particles) {
  EscapeStatistics s;
  s.exposure = static_cast<double>(n_particles) * e.T;
  for (const Hop& h : e.hops) {
    ++s.hops;
    if (h.to > h.from) ++s.right; else ++s.left;
  }
  if (s.hops > 0) {
    s.mean_residence = s.exposure / static_cast<double>(s.hops);
    s.right_fraction = static_cast<double>(s.right) / static_cast<double>(s.hops);
  }
  if (s.right > 0) s.time_right = s.exposure / static_cast<double>(s.right);
  if (s.left > 0) s.time_left = s.exposure / static_cast<double>(s.left);
  return s;
}

double total_variation(const WellSeries& a, const WellSeries& b) {
  const int lo = std::min(a.j_min, b.j_min), hi = std::max(a.j_max(), b.j_max());
  double s = 0;
  for (int j = lo; j <= hi; ++j) s += std::abs(a.at(j) - b.at(j));
  return 0.5 * s;
}

}  // namespace fpmass
