#pragma once

#include <optional>
#include <vector>

#include "fpmass/fpsolver.hpp"
#include "fpmass/observables.hpp"

namespace fpmass {

enum class Direction { Right, Left, Symmetric };
enum class LatticeMethod { ExactPoisson, Rk4 };

Direction direction_for_sigma(double sigma);

struct LatticeMassState {
  int j_min = 0;
  std::vector<double> m;
  double sink_left = 0, sink_right = 0;  // mass that left the window
  Direction dir = Direction::Right;
  double kappa = 1.0;                    // leftward rate in the symmetric variant
  std::optional<XProfile> x_profile;     // attached heat factor, if any

  int j_max() const { return j_min + static_cast<int>(m.size()) - 1; }
  double at(int j) const { return (j < j_min || j > j_max()) ? 0.0 : m[j - j_min]; }
  double window_mass() const;
  double total() const { return window_mass() + sink_left + sink_right; }
};

struct LatticeRates {
  std::vector<double> dm;
  double d_sink_left = 0, d_sink_right = 0;
};

LatticeRates rhs(const LatticeMassState& s, double kappa);

double poisson_kernel(double t, int j);
// Poisson factor times the heat kernel when dim > 0.
double fundamental_solution(double t, int dj, double r2 = 0.0, int dim = 0);

// Smallest window radius keeping the Poisson tail beyond it below 1e-12 at time T.
int window_radius(double T);

struct LatticeTrajectory {
  std::vector<double> times;
  std::vector<LatticeMassState> states;
};

// States at t = 0, cadence, ..., T.
LatticeTrajectory integrate(const LatticeMassState& s0, double T, LatticeMethod method, double cadence = 0.0);

// sum_j int_0^T |a_j - b_j| dt by the trapezoidal rule on the shared time grid.
double compare_l1(const std::vector<WellSeries>& pde, const std::vector<WellSeries>& lattice,
                  const std::vector<double>& pde_times, const std::vector<double>& lattice_times);

std::vector<WellSeries> to_series(const LatticeTrajectory& tr);

}  // namespace fpmass
