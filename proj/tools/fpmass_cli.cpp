#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "fpmass/commands.hpp"
#include "fpmass/errors.hpp"

using namespace fpmass;

namespace {

// Flag values that override the config file when given.
struct Overrides {
  std::optional<std::string> potential, regime, init, out, direction, method, x_profile, family, params, wells, nu_list,
      times;
  std::optional<double> sigma, nu, T, cadence, tol, kappa, dt, cells_per_nu;
  std::optional<int> cells_per_well, cells;
  std::optional<std::uint64_t> seed, particles;
  bool printed_sign = false;
};

std::pair<int, int> parse_wells(const std::string& s) {
  const auto colon = s.find(':');
  try {
    if (colon == std::string::npos) {
      const int J = std::stoi(s);
      if (J < 0) throw ConfigError("--wells J needs J >= 0");
      return {-J, J};
    }
    return {std::stoi(s.substr(0, colon)), std::stoi(s.substr(colon + 1))};
  } catch (const std::logic_error&) {
    throw ConfigError("--wells expects J or lo:hi");
  }
}

void apply(const Overrides& o, RunConfig& c, const std::string& command) {
  if (o.potential) c.potential = parse_potential_flag(*o.potential);
  if (o.regime) c.regime = *o.regime;
  if (o.sigma) c.sigma = *o.sigma;
  if (o.nu) c.nu = *o.nu;
  if (o.nu_list) c.nu_list = parse_list(*o.nu_list);
  if (o.wells) std::tie(c.well_lo, c.well_hi) = parse_wells(*o.wells);
  if (o.cells_per_well) c.cells_per_well = *o.cells_per_well;
  if (o.T) c.T = *o.T;
  if (o.cadence) c.cadence = *o.cadence;
  if (o.tol) c.tol = *o.tol;
  if (o.init) c.init = *o.init;
  if (o.out) c.out = *o.out;
  if (o.seed) c.seed = *o.seed;
  if (o.direction) c.direction = *o.direction;
  if (o.kappa) c.kappa = *o.kappa;
  if (o.method) c.method = *o.method;
  if (o.x_profile) c.x_profile = *o.x_profile;
  if (o.family) c.dw_family = *o.family;
  if (o.params) c.dw_params = parse_list(*o.params);
  if (o.cells_per_nu) c.cells_per_nu = *o.cells_per_nu;
  if (o.cells) c.periodic_cells = *o.cells;
  if (o.printed_sign) c.printed_sign = true;
  if (o.particles) c.particles = *o.particles;
  if (o.times) c.mc_times = parse_list(*o.times);
  if (o.dt) {
    if (command == "mc") c.mc_dt = *o.dt; else c.fixed_dt = *o.dt;
  }
  if (command == "doublewell") c.regime = "doublewell";
  if (command == "supercritical") c.regime = "supercritical";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fokker-Planck mass dynamics in tilted periodic and double-well landscapes"};
  app.require_subcommand(1);
  std::string config_file;
  Overrides ov;
  CommandOptions opts;
  std::string observables;
  bool dump = false;

  app.add_option("--config", config_file, "JSON run configuration (a previous run.json also works)");
  auto common = [&](CLI::App* s) {
    s->add_option("--potential", ov.potential, "cosine[:A,L] | g_of_sin:g0,g1,... | table:file:L");
    s->add_option("--sigma", ov.sigma, "tilt");
    s->add_option("--nu", ov.nu, "noise level");
    s->add_option("--out", ov.out, "output directory");
    s->add_option("--config", config_file, "JSON run configuration");
  };
  auto solver = [&](CLI::App* s) {
    s->add_option("--wells", ov.wells, "J (wells -J..J) or lo:hi");
    s->add_option("--cells-per-well", ov.cells_per_well);
    s->add_option("--T", ov.T, "final time in Kramers units");
    s->add_option("--cadence", ov.cadence, "output interval");
    s->add_option("--tol", ov.tol, "step-doubling tolerance");
    s->add_option("--init", ov.init, "gibbs-well:j | gaussian:p0,width | table:file");
  };

  auto* asym = app.add_subcommand("asymptotics", "critical points, barriers and asymptotic scalars as JSON");
  common(asym);
  auto* weights = app.add_subcommand("weights", "transition-layer weights psi_j and phi as CSV");
  common(weights);
  weights->add_flag("--dump", dump, "write the table to stdout");
  weights->add_option("--wells", ov.wells);
  weights->add_option("--samples", opts.samples_per_well, "samples per well");
  auto* solve = app.add_subcommand("solve", "PDE run with diagnostics and density snapshots");
  common(solve);
  solver(solve);
  solve->add_option("--observables", observables, "comma list from mass,E,D,P,K,V,m,mbar,mtilde,Dj");
  auto* lattice = app.add_subcommand("lattice", "limit lattice masses");
  common(lattice);
  lattice->add_option("--direction", ov.direction, "right | left | symmetric");
  lattice->add_option("--kappa", ov.kappa, "leftward rate for the symmetric walk");
  lattice->add_option("--T", ov.T);
  lattice->add_option("--cadence", ov.cadence);
  lattice->add_option("--wells", ov.wells);
  lattice->add_option("--init", opts.lattice_init, "point:j | table:file");
  lattice->add_option("--method", ov.method, "exact-poisson | rk4");
  lattice->add_option("--x-profile", ov.x_profile, "gaussian:x0,variance | point:x0");
  lattice->add_option("--x-samples", opts.x_samples);
  auto* compare = app.add_subcommand("compare", "L1 time-integrated discrepancy between PDE and lattice masses");
  common(compare);
  solver(compare);
  compare->add_option("--diagnostics", opts.diagnostics_file, "diagnostics.csv of an earlier solve");
  compare->add_option("--method", ov.method);
  compare->add_option("--direction", ov.direction);
  compare->add_option("--kappa", ov.kappa);
  auto* dw = app.add_subcommand("doublewell", "double-well PDE run and limit ODE reference");
  dw->add_option("--family", ov.family, "blended | quartic");
  dw->add_option("--params", ov.params, "h-,h+,omega0,omega-,omega+");
  dw->add_option("--nu", ov.nu);
  dw->add_option("--T", ov.T);
  dw->add_option("--cadence", ov.cadence);
  dw->add_option("--tol", ov.tol);
  dw->add_option("--cells-per-nu", ov.cells_per_nu);
  dw->add_option("--init", opts.dw_init, "left | right | equilibrium | gaussian:p0,width");
  dw->add_option("--out", ov.out);
  dw->add_option("--config", config_file);
  auto* sc = app.add_subcommand("supercritical", "ballistic transport speed");
  common(sc);
  sc->add_option("--T", ov.T, "final time, tau = 1");
  sc->add_option("--cadence", ov.cadence);
  sc->add_option("--cells", ov.cells);
  sc->add_option("--dt", ov.dt);
  sc->add_flag("--printed-sign", ov.printed_sign, "also report the velocity with the opposite sign convention");
  auto* mc = app.add_subcommand("mc", "Langevin ensemble: hop log and well occupation");
  common(mc);
  mc->add_option("--particles", ov.particles);
  mc->add_option("--T", ov.T, "final time in Kramers units");
  mc->add_option("--dt", ov.dt, "step in Kramers units; default is the largest stable one");
  mc->add_option("--seed", ov.seed);
  mc->add_option("--times", ov.times, "comma list of occupation times");
  auto* sweep = app.add_subcommand("sweep", "convergence study over a descending nu list");
  common(sweep);
  solver(sweep);
  sweep->add_option("--nu-list", ov.nu_list, "comma list, descending");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  CLI::App* cmd = app.get_subcommands().front();
  const std::string name = cmd->get_name();
  try {
    RunConfig c = config_file.empty() ? RunConfig{} : load_config(config_file);
    apply(ov, c, name);
    if (!observables.empty()) {
      std::stringstream ss(observables);
      std::string item;
      while (std::getline(ss, item, ',')) opts.observables.push_back(item);
    }
    validate(c);
    if (name == "asymptotics") cmd_asymptotics(c, std::cout);
    else if (name == "weights") cmd_weights(c, opts, std::cout);
    else if (name == "solve") cmd_solve(c, opts, std::cout);
    else if (name == "lattice") cmd_lattice(c, opts, std::cout);
    else if (name == "compare") cmd_compare(c, opts, std::cout);
    else if (name == "doublewell") cmd_doublewell(c, opts, std::cout);
    else if (name == "supercritical") cmd_supercritical(c, std::cout);
    else if (name == "mc") cmd_mc(c, std::cout);
    else if (name == "sweep") cmd_sweep(c, std::cout);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
