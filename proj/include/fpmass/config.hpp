#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpmass/doublewell.hpp"
#include "fpmass/potential.hpp"

namespace fpmass {

struct PotentialSpec {
  std::string kind = "cosine";  // cosine | g_of_sin | table
  double amplitude = 1.0;
  double period = 6.283185307179586;
  std::vector<double> g;        // G coefficients for g_of_sin
  std::string file;             // CSV for table
};

struct RunConfig {
  PotentialSpec potential;
  std::string regime = "subcritical";  // subcritical | supercritical | doublewell
  double sigma = 0.5;
  double nu = 0.5;
  std::vector<double> nu_list;

  // solver
  int well_lo = -2, well_hi = 14;
  int cells_per_well = 200;
  double T = 2.0;
  double cadence = 0.01;
  double tol = 1e-6;
  double scheme_theta = 1.0;
  std::string init = "gibbs-well:0";

  // lattice
  std::string direction;  // right | left | symmetric; empty: from sigma
  double kappa = -1.0;    // negative: from the asymptotic scalars
  std::string method = "exact-poisson";
  std::string x_profile;  // gaussian:x0,var | point:x0

  // double well
  std::string dw_family = "blended";    // blended | quartic
  std::vector<double> dw_params{1, 2, 0.5, 1, 1.2};  // h-, h+, omega0, omega-, omega+
  double cells_per_nu = 40.0;

  // supercritical
  int periodic_cells = 2048;
  double fixed_dt = 1e-3;
  bool printed_sign = false;

  // Monte Carlo
  std::uint64_t particles = 1000;
  double mc_dt = 0.0;  // 0: largest stable step
  std::vector<double> mc_times;

  std::string out = "out";
  std::uint64_t seed = 1;
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);
RunConfig load_config(const std::filesystem::path& file);
void validate(const RunConfig& c);

PeriodicPotential make_potential(const PotentialSpec& spec);
// "cosine", "cosine:A,L", "g_of_sin:g0,g1,...", "table:file.csv:period"
PotentialSpec parse_potential_flag(const std::string& s);
DoubleWellPotential make_double_well(const RunConfig& c);

std::uint64_t config_hash(const nlohmann::json& j);
std::string fmt17(double v);
std::vector<double> parse_list(const std::string& s);

}  // namespace fpmass
