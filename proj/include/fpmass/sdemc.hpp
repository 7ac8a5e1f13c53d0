#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "fpmass/lattice.hpp"
#include "fpmass/potential.hpp"

namespace fpmass {

struct McParams {
  double sigma = 0, nu = 0.5, tau = 1.0;
  std::uint64_t n_particles = 1;
  double T = 1.0;   // Kramers units
  double dt = 1e-3; // Kramers units
  std::uint64_t seed = 0;
  std::vector<double> snapshot_times;
  double p_start = std::numeric_limits<double>::quiet_NaN();  // default: P_0
  int block = 1024;
  int table_cells = 4096;  // drift table resolution per period
};

struct Hop {
  std::uint32_t particle;
  double time;
  std::int64_t from, to;
  bool operator==(const Hop&) const = default;
};

struct Ensemble {
  std::vector<double> positions;
  std::uint64_t seed = 0;
  double dt = 0, T = 0;
  std::uint64_t steps = 0;
  std::vector<Hop> hops;  // ordered by (time, particle)
  std::vector<double> snapshot_times;
  std::vector<std::vector<double>> snapshots;
  CriticalPoints cp;
};

enum class Execution { Serial, Parallel };

// Largest admissible step: 0.01 tau min(1, nu^2 / zeta).
double max_stable_dt(const PeriodicPotential& pot, double nu, double tau);

// Blocked, vectorized kernel; Serial and Parallel give bitwise identical results.
Ensemble simulate(const PeriodicPotential& pot, const McParams& prm, Execution ex = Execution::Parallel);
// One particle at a time with exact H'; kept as the reference implementation.
Ensemble simulate_reference(const PeriodicPotential& pot, const McParams& prm);

// Occupation of wells J_j at each requested snapshot; empirical masses.
std::vector<WellSeries> occupation_histogram(const Ensemble& e, const CriticalPoints& cp);

struct EscapeStatistics {
  std::uint64_t hops = 0, right = 0, left = 0;
  double exposure = 0;          // particles times duration
  double mean_residence = 0;    // exposure / hops
  double right_fraction = 0;
  double time_right = 0, time_left = 0;  // exposure per hop in one direction
};

EscapeStatistics escape_statistics(const Ensemble& e, std::uint64_t n_particles);

double total_variation(const WellSeries& a, const WellSeries& b);

namespace detail {

struct KernelSetup {
  double L, inv_L, P0, sigma;
  double dt, dt_over_tau, noise;  // step, dt / tau and sqrt(2 nu^2 dt / tau)
  int table_cells;
  const double* f;   // sigma - H' at table nodes, table_cells + 1 entries
  const double* df;  // (sigma - H')' times node spacing
  std::uint64_t steps;
  std::uint32_t key0, key1;
  const std::uint64_t* snap_steps;
  int n_snaps;
};

// Advances particles [first, first + count) and appends their hops.
void run_block(const KernelSetup& k, std::uint32_t first, int count, double* x, double* const* snaps,
               std::vector<Hop>& hops);

}  // namespace detail

}  // namespace fpmass
