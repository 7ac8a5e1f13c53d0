// Built with -O3 -ffast-math (and -march=native when enabled); keep the inner loops branch-free.
#include <cmath>
#include <cstdint>
#include <cstring>

#include "fpmass/sdemc.hpp"

namespace fpmass::detail {

namespace {

constexpr int kMaxBlock = 1024;

#define PHILOX_ROUND()                                                   \
  do {                                                                   \
    const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * c0;            \
    const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * c2;            \
    const std::uint32_t n0 = static_cast<std::uint32_t>(p1 >> 32) ^ c1 ^ k0; \
    const std::uint32_t n2 = static_cast<std::uint32_t>(p0 >> 32) ^ c3 ^ k1; \
    c1 = static_cast<std::uint32_t>(p1);                                 \
    c3 = static_cast<std::uint32_t>(p0);                                 \
    c0 = n0;                                                             \
    c2 = n2;                                                             \
    k0 += 0x9E3779B9u;                                                   \
    k1 += 0xBB67AE85u;                                                   \
  } while (0)

void normals(std::uint32_t first, int n, std::uint64_t pair, std::uint32_t key0, std::uint32_t key1,
             double* __restrict z0, double* __restrict z1) {
  const std::uint32_t lo = static_cast<std::uint32_t>(pair), hi = static_cast<std::uint32_t>(pair >> 32);
#pragma omp simd
  for (int i = 0; i < n; ++i) {
    std::uint32_t c0 = first + static_cast<std::uint32_t>(i), c1 = lo, c2 = hi, c3 = 0u;
    std::uint32_t k0 = key0, k1 = key1;
    PHILOX_ROUND(); PHILOX_ROUND(); PHILOX_ROUND(); PHILOX_ROUND(); PHILOX_ROUND();
    PHILOX_ROUND(); PHILOX_ROUND(); PHILOX_ROUND(); PHILOX_ROUND(); PHILOX_ROUND();
    const double u1 = (static_cast<double>((std::uint64_t{c0} << 21) ^ (c1 >> 11)) + 1.0) * 0x1.0p-53;
    const double u2 = (static_cast<double>((std::uint64_t{c2} << 21) ^ (c3 >> 11)) + 1.0) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double c = std::cos(2.0 * 3.14159265358979323846 * u2);
    z0[i] = r * c;
    z1[i] = std::copysign(r * std::sqrt(1.0 - c * c), 0.5 - u2);
  }
}

#undef PHILOX_ROUND

// Euler-Maruyama substep; returns nonzero if any particle reached a neighbouring minimum.
int advance(const KernelSetup& k, int n, double* __restrict x, const double* __restrict home,
            const double* __restrict z) {
  const double* __restrict f = k.f;
  const double* __restrict df = k.df;
  const double inv_L = k.inv_L, L = k.L, cells = k.table_cells, a = k.dt_over_tau, s = k.noise;
  const int last = k.table_cells - 1;
  int any = 0;
#pragma omp simd reduction(| : any)
  for (int i = 0; i < n; ++i) {
    const double xi = x[i];
    const double y = xi * inv_L;
    const double fr = (y - std::floor(y)) * cells;
    int j = static_cast<int>(fr);
    j = j > last ? last : j;
    const double t = fr - j;
    const double t2 = t * t, t3 = t2 * t;
    const double drift = (2 * t3 - 3 * t2 + 1) * f[j] + (t3 - 2 * t2 + t) * df[j] + (3 * t2 - 2 * t3) * f[j + 1] +
                         (t3 - t2) * df[j + 1];
    const double xn = xi + drift * a + s * z[i];
    x[i] = xn;
    any |= static_cast<int>(xn >= home[i] + L) | static_cast<int>(xn <= home[i] - L);
  }
  return any;
}

void collect_hops(const KernelSetup& k, std::uint32_t first, int n, const double* x, double* home, double t,
                  std::vector<Hop>& hops) {
  for (int i = 0; i < n; ++i) {
    int dir = 0;
    if (x[i] >= home[i] + k.L) dir = 1;
    else if (x[i] <= home[i] - k.L) dir = -1;
    if (dir == 0) continue;
    const auto from = static_cast<std::int64_t>(std::llround((home[i] - k.P0) * k.inv_L));
    hops.push_back(Hop{first + static_cast<std::uint32_t>(i), t, from, from + dir});
    home[i] = k.P0 + static_cast<double>(from + dir) * k.L;
  }
}

}  // namespace

void run_block(const KernelSetup& k, std::uint32_t first, int count, double* x, double* const* snaps,
               std::vector<Hop>& hops) {
  alignas(64) double xs[kMaxBlock], home[kMaxBlock], z0[kMaxBlock], z1[kMaxBlock];
  const int n = count;
  std::memcpy(xs, x, sizeof(double) * n);
  for (int i = 0; i < n; ++i) home[i] = k.P0 + k.L * std::nearbyint((xs[i] - k.P0) * k.inv_L);
  int snap = 0;
  auto take_snapshots = [&](std::uint64_t step) {
    while (snap < k.n_snaps && k.snap_steps[snap] == step) {
      std::memcpy(snaps[snap] + first, xs, sizeof(double) * n);
      ++snap;
    }
  };
  take_snapshots(0);
  for (std::uint64_t step = 0; step < k.steps; step += 2) {
    normals(first, n, step >> 1, k.key0, k.key1, z0, z1);
    if (advance(k, n, xs, home, z0)) collect_hops(k, first, n, xs, home, static_cast<double>(step + 1) * k.dt, hops);
    take_snapshots(step + 1);
    if (step + 1 >= k.steps) break;
    if (advance(k, n, xs, home, z1)) collect_hops(k, first, n, xs, home, static_cast<double>(step + 2) * k.dt, hops);
    take_snapshots(step + 2);
  }
  std::memcpy(x, xs, sizeof(double) * n);
}

}  // namespace fpmass::detail
