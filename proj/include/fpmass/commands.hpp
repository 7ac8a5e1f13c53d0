#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpmass/config.hpp"
#include "fpmass/observables.hpp"

namespace fpmass {

// Flags that only make sense on the command line.
struct CommandOptions {
  std::vector<std::string> observables;  // diagnostics column groups; empty = all
  int samples_per_well = 200;            // weights --dump
  std::string diagnostics_file;          // compare: read PDE masses instead of solving
  int x_samples = 41;                    // lattice product output
  std::string lattice_init = "point:0";  // point:j | table:file
  std::string dw_init = "left";          // left | right | equilibrium | gaussian:p0,width
};

struct ConvergenceRow {
  double nu = 0;
  double error = 0;  // sum_j int_0^T |m_j - m_j^lattice| dt
  double order = 0;  // log(e_{k-1}/e_k) / log(nu_{k-1}/nu_k); NaN on the first row
  double tau = 0, theta = 0;
  double mass_drift = 0;  // max |mass(t) - mass(0)| over the run
};

struct ConvergenceRun {
  ConvergenceRow row;
  std::vector<double> times;
  std::vector<WellSeries> pde, lattice;
};

// PDE from the configured initial data, lattice from m~_j(0). With rate_corrected the lattice clock runs at
// 1/(1+theta).
ConvergenceRun convergence_point(const RunConfig& c, double nu, bool rate_corrected = false);
std::vector<ConvergenceRow> run_convergence_study(const RunConfig& c);

// "gibbs-well:j", "gaussian:p0,width", "table:file"
DensityField initial_density(const std::string& spec, const TiltedDiagnostics& diag);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
void write_csv(const std::filesystem::path& file, const CsvTable& t);
CsvTable read_csv(const std::filesystem::path& file);
void write_json(const std::filesystem::path& file, const nlohmann::json& j);
void ensure_directory(const std::filesystem::path& dir);
// Program version, command, full config, its hash and seed; enough to replay the run.
nlohmann::json run_metadata(const std::string& command, const RunConfig& c);

nlohmann::json asymptotics_json(const AsymptoticScalars& s);

// Subcommands. Results go to out (stdout) and/or files under c.out.
void cmd_asymptotics(const RunConfig& c, std::ostream& out);
void cmd_weights(const RunConfig& c, const CommandOptions& o, std::ostream& out);
void cmd_solve(const RunConfig& c, const CommandOptions& o, std::ostream& out);
void cmd_lattice(const RunConfig& c, const CommandOptions& o, std::ostream& out);
void cmd_compare(const RunConfig& c, const CommandOptions& o, std::ostream& out);
void cmd_doublewell(const RunConfig& c, const CommandOptions& o, std::ostream& out);
void cmd_supercritical(const RunConfig& c, std::ostream& out);
void cmd_mc(const RunConfig& c, std::ostream& out);
void cmd_sweep(const RunConfig& c, std::ostream& out);

}  // namespace fpmass
