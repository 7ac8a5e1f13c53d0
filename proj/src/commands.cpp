#include "fpmass/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "fpmass/asymptotics.hpp"
#include "fpmass/doublewell.hpp"
#include "fpmass/errors.hpp"
#include "fpmass/lattice.hpp"
#include "fpmass/sdemc.hpp"
#include "fpmass/supercritical.hpp"
#include "fpmass/weights.hpp"

namespace fpmass {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr int kDiagnosticsVersion = 1;

std::string after_colon(const std::string& s, const std::string& prefix) {
  if (s.rfind(prefix + ":", 0) != 0) return {};
  return s.substr(prefix.size() + 1);
}

std::string col(const std::string& name, int j) { return name + "_" + std::to_string(j); }

// Densities given as (p, rho) samples, linearly interpolated onto the cell centres.
DensityField density_from_table(const fs::path& file, const Grid1D& grid) {
  const CsvTable t = read_csv(file);
  if (t.header.size() < 2 || t.rows.size() < 2) throw ConfigError("density table needs columns p, rho");
  DensityField d{grid, std::vector<double>(grid.n, 0.0)};
  for (int i = 0; i < grid.n; ++i) {
    const double p = grid.center(i);
    auto it = std::lower_bound(t.rows.begin(), t.rows.end(), p,
                               [](const std::vector<double>& r, double x) { return r[0] < x; });
    if (it == t.rows.begin() || it == t.rows.end()) continue;
    const auto& b = *it;
    const auto& a = *(it - 1);
    const double w = (p - a[0]) / (b[0] - a[0]);
    d.values[i] = std::max(0.0, (1 - w) * a[1] + w * b[1]);
  }
  const double m = d.total_mass();
  if (!(m > 0)) throw ConfigError("density table has no mass on the grid");
  for (double& v : d.values) v /= m;
  return d;
}

Grid1D well_grid(const PeriodicPotential& pot, const RunConfig& c) {
  return make_well_grid(find_critical_points(pot, c.sigma), c.well_lo, c.well_hi, c.cells_per_well);
}

LatticeMethod parse_method(const std::string& m) {
  if (m == "exact-poisson") return LatticeMethod::ExactPoisson;
  if (m == "rk4") return LatticeMethod::Rk4;
  throw ConfigError("unknown lattice method '" + m + "'");
}

Direction parse_direction(const std::string& d, double sigma) {
  if (d.empty()) return direction_for_sigma(sigma);
  if (d == "right") return Direction::Right;
  if (d == "left") return Direction::Left;
  if (d == "symmetric") return Direction::Symmetric;
  throw ConfigError("unknown direction '" + d + "'");
}

// Symmetric walks have no Poisson convolution; fall back to rk4 there.
LatticeMethod method_for(Direction d, LatticeMethod requested) {
  return d == Direction::Symmetric ? LatticeMethod::Rk4 : requested;
}

std::optional<XProfile> parse_x_profile(const std::string& s) {
  if (s.empty()) return std::nullopt;
  if (auto g = after_colon(s, "gaussian"); !g.empty()) {
    auto v = parse_list(g);
    if (v.size() != 2 || !(v[1] > 0)) throw ConfigError("x profile gaussian:x0,variance");
    return XProfile::gaussian({v[0]}, v[1]);
  }
  if (auto p = after_colon(s, "point"); !p.empty()) {
    auto v = parse_list(p);
    if (v.size() != 1) throw ConfigError("x profile point:x0");
    return XProfile::point({v[0]});
  }
  throw ConfigError("unknown x profile '" + s + "'");
}

bool wants(const std::vector<std::string>& sel, const char* group) {
  return sel.empty() || std::find(sel.begin(), sel.end(), group) != sel.end();
}

void check_observables(const std::vector<std::string>& sel) {
  static const std::vector<std::string> known{"mass", "E", "D", "P", "K", "V", "m", "mbar", "mtilde", "Dj"};
  for (const auto& s : sel)
    if (std::find(known.begin(), known.end(), s) == known.end()) throw ConfigError("unknown observable '" + s + "'");
}

std::string series_row_csv(const std::vector<double>& row) {
  std::string line;
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (k) line += ',';
    line += fmt17(row[k]);
  }
  return line;
}

double tau_for(const PeriodicPotential& pot, double sigma, double nu) {
  return classify(pot, sigma) == Regime::Subcritical ? compute_scalars(pot, sigma, nu).tau : 1.0;
}

}  // namespace

// ---- emission ----

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

void write_csv(const fs::path& file, const CsvTable& t) {
  if (file.has_parent_path()) ensure_directory(file.parent_path());
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  for (std::size_t k = 0; k < t.header.size(); ++k) out << (k ? "," : "") << t.header[k];
  out << '\n';
  for (const auto& r : t.rows) out << series_row_csv(r) << '\n';
  if (!out) throw IoError("write failed for " + file.string());
}

CsvTable read_csv(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot read " + file.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) return t;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.header.push_back(cell);
  }
  // a header made of numbers is data
  bool numeric = !t.header.empty();
  for (const auto& h : t.header) {
    char* end = nullptr;
    std::strtod(h.c_str(), &end);
    if (end == h.c_str() || *end != '\0') numeric = false;
  }
  auto parse = [&](const std::string& l) {
    std::vector<double> r;
    std::stringstream ss(l);
    std::string cell;
    while (std::getline(ss, cell, ',')) r.push_back(std::strtod(cell.c_str(), nullptr));
    return r;
  };
  if (numeric) {
    t.rows.push_back(parse(line));
    for (std::size_t k = 0; k < t.header.size(); ++k) t.header[k] = "c" + std::to_string(k);
  }
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') t.rows.push_back(parse(line));
  return t;
}

void write_json(const fs::path& file, const json& j) {
  if (file.has_parent_path()) ensure_directory(file.parent_path());
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  out << j.dump(2) << '\n';
}

json run_metadata(const std::string& command, const RunConfig& c) {
  const json cfg = config_to_json(c);
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(cfg)));
  return json{{"program", "fpmass"},
              {"version", kVersion},
              {"diagnostics_version", kDiagnosticsVersion},
              {"command", command},
              {"compiler", __VERSION__},
              {"config", cfg},
              {"config_hash", hash},
              {"seed", c.seed}};
}

json asymptotics_json(const AsymptoticScalars& s) {
  return json{{"sigma", s.sigma},     {"nu", s.nu},           {"P0", s.cp.p_min0},
              {"Q0", s.cp.p_max0},    {"hL", s.kd.h_left},    {"hR", s.kd.h_right},
              {"cK", s.kd.c_k},       {"tau", s.tau},         {"log_tau", s.log_tau},
              {"log_mu0", s.log_mu0}, {"log_eta0", s.log_eta0}, {"kappa", s.kappa},
              {"theta", s.theta}};
}

// ---- initial data ----

DensityField initial_density(const std::string& spec, const TiltedDiagnostics& diag) {
  if (auto g = after_colon(spec, "gibbs-well"); !g.empty()) {
    const int j = static_cast<int>(parse_list(g).at(0));
    if (j < diag.j_min() || j > diag.j_max()) throw WindowError("initial well outside the simulated window");
    DensityField d = diag.local_gibbs(j);
    const double m = d.total_mass();
    for (double& v : d.values) v /= m;
    return d;
  }
  if (auto g = after_colon(spec, "gaussian"); !g.empty()) {
    auto v = parse_list(g);
    if (v.size() != 2 || !(v[1] > 0)) throw ConfigError("gaussian initial data needs p0,width");
    DensityField d = diag.gaussian(v[0], v[1]);
    const double m = d.total_mass();
    for (double& x : d.values) x /= m;
    return d;
  }
  if (auto f = after_colon(spec, "table"); !f.empty()) {
    return density_from_table(f, diag.local_gibbs(diag.j_min()).grid);
  }
  throw ConfigError("unknown initial data '" + spec + "'");
}

// ---- convergence study ----

ConvergenceRun convergence_point(const RunConfig& c, double nu, bool rate_corrected) {
  const PeriodicPotential pot = make_potential(c.potential);
  if (classify(pot, c.sigma) != Regime::Subcritical) throw RegimeError("convergence study needs a subcritical tilt");
  const Grid1D grid = well_grid(pot, c);
  TiltedDiagnostics diag(pot, c.sigma, nu, grid, c.well_lo, c.well_hi);
  const AsymptoticScalars& s = diag.scalars();
  const DensityField rho0 = initial_density(c.init, diag);
  const Tridiagonal A = build_generator(diag.heff(), nu, grid.h);

  SolverConfig sc;
  sc.nu = nu;
  sc.sigma = c.sigma;
  sc.tau = s.tau;
  sc.scheme_theta = c.scheme_theta;
  sc.tol = c.tol;
  sc.keep_snapshots = false;

  ConvergenceRun run;
  WellSeries mt0;
  double mass0 = 0;
  auto observer = [&](double t, const DensityField& rho) {
    if (run.times.empty()) {
      mt0 = substitute_tilde(rho, *diag.psi_table(), s.cp);
      mass0 = rho.total_mass();
    }
    run.row.mass_drift = std::max(run.row.mass_drift, std::abs(rho.total_mass() - mass0));
    run.times.push_back(t);
    run.pde.push_back(partial_masses(rho, s.cp, c.well_lo, c.well_hi));
  };
  solve(rho0, c.T, A, sc, c.cadence, observer);

  LatticeMassState l0;
  l0.j_min = c.well_lo;
  for (int j = c.well_lo; j <= c.well_hi; ++j) l0.m.push_back(mt0.at(j));
  l0.dir = direction_for_sigma(c.sigma);
  l0.kappa = s.kappa;
  const double f = rate_corrected ? 1.0 / (1.0 + s.theta) : 1.0;
  const LatticeTrajectory tr = integrate(l0, c.T * f, method_for(l0.dir, LatticeMethod::ExactPoisson), c.cadence * f);
  if (tr.times.size() != run.times.size()) throw GridMismatchError("lattice and PDE output counts differ");
  std::vector<double> lt(tr.times.size());
  for (std::size_t k = 0; k < lt.size(); ++k) lt[k] = tr.times[k] / f;
  run.lattice = to_series(tr);
  run.row.nu = nu;
  run.row.tau = s.tau;
  run.row.theta = s.theta;
  run.row.error = compare_l1(run.pde, run.lattice, run.times, lt);
  run.row.order = std::numeric_limits<double>::quiet_NaN();
  return run;
}

std::vector<ConvergenceRow> run_convergence_study(const RunConfig& c) {
  const auto& nus = c.nu_list;
  if (nus.size() < 3) throw ConfigError("convergence study needs at least three nu values");
  for (std::size_t k = 1; k < nus.size(); ++k)
    if (!(nus[k] < nus[k - 1])) throw ConfigError("nu values must be strictly descending");
  std::vector<ConvergenceRow> rows(nus.size());
  std::vector<std::exception_ptr> errors(nus.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t k = 0; k < nus.size(); ++k) {
    try {
      rows[k] = convergence_point(c, nus[k]).row;
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (std::size_t k = 1; k < rows.size(); ++k)
    rows[k].order = std::log(rows[k - 1].error / rows[k].error) / std::log(nus[k - 1] / nus[k]);
  return rows;
}

// ---- subcommands ----

void cmd_asymptotics(const RunConfig& c, std::ostream& out) {
  const PeriodicPotential pot = make_potential(c.potential);
  out << asymptotics_json(compute_scalars(pot, c.sigma, c.nu)).dump(2) << '\n';
}

void cmd_weights(const RunConfig& c, const CommandOptions& o, std::ostream& out) {
  const PeriodicPotential pot = make_potential(c.potential);
  const AsymptoticScalars s = compute_scalars(pot, c.sigma, c.nu);
  const GibbsEvaluator g(pot, c.sigma, c.nu);
  auto table = std::make_shared<const PsiTable>(s, g);
  const WeightPhi phi(table, s.cp, c.well_lo, c.well_hi);
  std::vector<WeightPsi> psi;
  for (int j = c.well_lo; j <= c.well_hi; ++j) psi.emplace_back(j, table, s.cp.period);

  CsvTable t;
  t.header.push_back("p");
  for (int j = c.well_lo; j <= c.well_hi; ++j) t.header.push_back(col("psi", j));
  t.header.push_back("phi");
  const int n = std::max(2, o.samples_per_well) * (c.well_hi - c.well_lo + 1);
  for (int i = 0; i <= n; ++i) {
    const double p = phi.lower() + (phi.upper() - phi.lower()) * i / n;
    std::vector<double> r{p};
    for (const auto& w : psi) r.push_back(w(p));
    r.push_back(phi(p));
    t.rows.push_back(std::move(r));
  }
  for (std::size_t k = 0; k < t.header.size(); ++k) out << (k ? "," : "") << t.header[k];
  out << '\n';
  for (const auto& r : t.rows) out << series_row_csv(r) << '\n';
}

void cmd_solve(const RunConfig& c, const CommandOptions& o, std::ostream& out) {
  check_observables(o.observables);
  const PeriodicPotential pot = make_potential(c.potential);
  const Grid1D grid = well_grid(pot, c);
  TiltedDiagnostics diag(pot, c.sigma, c.nu, grid, c.well_lo, c.well_hi);
  const AsymptoticScalars& s = diag.scalars();
  const DensityField rho0 = initial_density(c.init, diag);
  const Tridiagonal A = build_generator(diag.heff(), c.nu, grid.h);
  SolverConfig sc;
  sc.nu = c.nu;
  sc.sigma = c.sigma;
  sc.tau = s.tau;
  sc.scheme_theta = c.scheme_theta;
  sc.tol = c.tol;
  sc.keep_snapshots = false;

  const fs::path dir = c.out;
  ensure_directory(dir);
  const auto& sel = o.observables;
  CsvTable diagcsv;
  auto& h = diagcsv.header;
  h.push_back("t");
  for (const char* g : {"mass", "E", "D", "P", "K", "V"})
    if (wants(sel, g)) h.push_back(g);
  for (const char* g : {"m", "mbar", "mtilde", "Dj"})
    if (wants(sel, g))
      for (int j = c.well_lo; j <= c.well_hi; ++j) h.push_back(col(g, j));

  int snap = 0;
  auto observer = [&](double t, const DensityField& rho) {
    const DiagnosticsRecord r = diag(t, rho);
    std::vector<double> row{t};
    if (wants(sel, "mass")) row.push_back(r.mass);
    if (wants(sel, "E")) row.push_back(r.E);
    if (wants(sel, "D")) row.push_back(r.D.total);
    if (wants(sel, "P")) row.push_back(r.mom.P);
    if (wants(sel, "K")) row.push_back(r.mom.K);
    if (wants(sel, "V")) row.push_back(r.mom.V);
    const std::pair<const char*, const WellSeries*> groups[] = {
        {"m", &r.m}, {"mbar", &r.mbar}, {"mtilde", &r.mtilde}, {"Dj", &r.D.per_well}};
    for (const auto& [g, w] : groups)
      if (wants(sel, g))
        for (int j = c.well_lo; j <= c.well_hi; ++j) row.push_back(w->at(j));
    diagcsv.rows.push_back(std::move(row));

    CsvTable d{{"p", "rho"}, {}};
    for (int i = 0; i < rho.grid.n; ++i) d.rows.push_back({rho.grid.center(i), rho.values[i]});
    char name[32];
    std::snprintf(name, sizeof name, "density_%04d.csv", snap++);
    write_csv(dir / name, d);
  };
  const SolveResult res = solve(rho0, c.T, A, sc, c.cadence, observer);
  write_csv(dir / "diagnostics.csv", diagcsv);

  json meta = run_metadata("solve", c);
  meta["scalars"] = asymptotics_json(s);
  meta["diagnostics_columns"] = diagcsv.header;
  meta["grid"] = {{"p_lo", grid.p_lo}, {"h", grid.h}, {"n", grid.n}};
  meta["steps"] = {{"accepted", res.accepted}, {"rejected", res.rejected}};
  write_json(dir / "run.json", meta);
  out << json{{"snapshots", snap}, {"accepted", res.accepted}, {"rejected", res.rejected},
              {"final_mass", res.final_state.total_mass()}}
             .dump()
      << '\n';
}

void cmd_lattice(const RunConfig& c, const CommandOptions& o, std::ostream& out) {
  LatticeMassState s0;
  s0.j_min = c.well_lo;
  s0.m.assign(c.well_hi - c.well_lo + 1, 0.0);
  s0.dir = parse_direction(c.direction, c.sigma);
  if (c.kappa >= 0) {
    s0.kappa = c.kappa;
  } else if (c.regime == "subcritical") {
    const PeriodicPotential pot = make_potential(c.potential);
    s0.kappa = compute_scalars(pot, c.sigma, c.nu).kappa;
  }
  if (auto p = after_colon(o.lattice_init, "point"); !p.empty()) {
    const int j = static_cast<int>(parse_list(p).at(0));
    if (j < c.well_lo || j > c.well_hi) throw WindowError("initial well outside the lattice window");
    s0.m[j - c.well_lo] = 1.0;
  } else if (auto f = after_colon(o.lattice_init, "table"); !f.empty()) {
    for (const auto& r : read_csv(f).rows) {
      if (r.size() < 2) throw ConfigError("lattice table needs columns j, m");
      const int j = static_cast<int>(std::lround(r[0]));
      if (j < c.well_lo || j > c.well_hi) throw WindowError("lattice table entry outside the window");
      s0.m[j - c.well_lo] = r[1];
    }
  } else {
    throw ConfigError("unknown lattice initial data '" + o.lattice_init + "'");
  }
  s0.x_profile = parse_x_profile(c.x_profile);
  const LatticeMethod method = parse_method(c.method);
  const LatticeTrajectory tr = integrate(s0, c.T, method, c.cadence);

  const fs::path dir = c.out;
  ensure_directory(dir);
  CsvTable m;
  m.header.push_back("t");
  for (int j = c.well_lo; j <= c.well_hi; ++j) m.header.push_back(col("m", j));
  m.header.push_back("sink_left");
  m.header.push_back("sink_right");
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    std::vector<double> r{tr.times[k]};
    r.insert(r.end(), tr.states[k].m.begin(), tr.states[k].m.end());
    r.push_back(tr.states[k].sink_left);
    r.push_back(tr.states[k].sink_right);
    m.rows.push_back(std::move(r));
  }
  write_csv(dir / "masses.csv", m);

  if (s0.x_profile) {
    const XProfile& xp = *s0.x_profile;
    const double spread = 5.0 * std::sqrt((xp.kind == XProfile::Kind::Gaussian ? xp.variance : 0.0) + 2.0 * c.T + 1.0);
    CsvTable prod{{"t", "j", "x", "value"}, {}};
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
      const double t = tr.times[k];
      if (t == 0.0 && xp.kind == XProfile::Kind::Point) continue;
      ProductSolution ps{xp, t, {}};
      for (int i = 0; i < o.x_samples; ++i) {
        const double x = xp.center[0] - spread + 2.0 * spread * i / std::max(1, o.x_samples - 1);
        const double a = ps.heat_value(std::span<const double>(&x, 1));
        for (int j = c.well_lo; j <= c.well_hi; ++j)
          prod.rows.push_back({t, static_cast<double>(j), x, tr.states[k].at(j) * a});
      }
    }
    write_csv(dir / "product.csv", prod);
  }
  write_json(dir / "run.json", run_metadata("lattice", c));
  out << json{{"final_window_mass", tr.states.back().window_mass()}, {"sink_left", tr.states.back().sink_left},
              {"sink_right", tr.states.back().sink_right}}
             .dump()
      << '\n';
}

void cmd_compare(const RunConfig& c, const CommandOptions& o, std::ostream& out) {
  std::vector<double> times, ltimes;
  std::vector<WellSeries> pde, lat;
  if (!o.diagnostics_file.empty()) {
    const CsvTable d = read_csv(o.diagnostics_file);
    auto find = [&](const std::string& name) {
      auto it = std::find(d.header.begin(), d.header.end(), name);
      if (it == d.header.end()) throw ConfigError("diagnostics file lacks column " + name);
      return static_cast<std::size_t>(it - d.header.begin());
    };
    if (d.rows.empty()) throw ConfigError("diagnostics file has no rows");
    const std::size_t it = find("t");
    LatticeMassState l0;
    l0.j_min = c.well_lo;
    l0.dir = parse_direction(c.direction, c.sigma);
    l0.kappa = c.kappa >= 0 ? c.kappa : 1.0;
    for (int j = c.well_lo; j <= c.well_hi; ++j) l0.m.push_back(d.rows[0][find(col("mtilde", j))]);
    for (const auto& r : d.rows) {
      times.push_back(r[it]);
      WellSeries w{c.well_lo, {}};
      for (int j = c.well_lo; j <= c.well_hi; ++j) w.v.push_back(r[find(col("m", j))]);
      pde.push_back(std::move(w));
    }
    // Lattice states at exactly the recorded times.
    const LatticeMethod method = method_for(l0.dir, parse_method(c.method));
    LatticeMassState cur = l0;
    double tprev = 0;
    for (double t : times) {
      if (t > tprev) cur = integrate(cur, t - tprev, method, t - tprev).states.back();
      tprev = t;
      lat.push_back(WellSeries{cur.j_min, cur.m});
    }
    ltimes = times;
  } else {
    ConvergenceRun run = convergence_point(c, c.nu);
    times = run.times;
    ltimes = run.times;
    pde = std::move(run.pde);
    lat = std::move(run.lattice);
  }
  const double l1 = compare_l1(pde, lat, times, ltimes);

  const fs::path dir = c.out;
  CsvTable t;
  t.header.push_back("t");
  for (int j = c.well_lo; j <= c.well_hi; ++j) t.header.push_back(col("m", j));
  for (int j = c.well_lo; j <= c.well_hi; ++j) t.header.push_back(col("lattice", j));
  for (std::size_t k = 0; k < times.size(); ++k) {
    std::vector<double> r{times[k]};
    for (int j = c.well_lo; j <= c.well_hi; ++j) r.push_back(pde[k].at(j));
    for (int j = c.well_lo; j <= c.well_hi; ++j) r.push_back(lat[k].at(j));
    t.rows.push_back(std::move(r));
  }
  write_csv(dir / "comparison.csv", t);
  json meta = run_metadata("compare", c);
  meta["l1"] = l1;
  write_json(dir / "run.json", meta);
  out << json{{"l1", l1}, {"T", times.empty() ? 0.0 : times.back()}}.dump() << '\n';
}

void cmd_doublewell(const RunConfig& c, const CommandOptions& o, std::ostream& out) {
  const DoubleWellPotential pot = make_double_well(c);
  const DoubleWellSystem sys(pot, c.nu, c.cells_per_nu);
  const DoubleWellScalars& s = sys.scalars();
  const Grid1D& grid = sys.grid();
  DensityField rho0;
  if (o.dw_init == "left") {
    rho0 = dw_local_gibbs(pot, s, grid, -1);
  } else if (o.dw_init == "right") {
    rho0 = dw_local_gibbs(pot, s, grid, +1);
  } else if (o.dw_init == "equilibrium") {
    rho0 = dw_equilibrium(pot, s, grid);
  } else if (auto g = after_colon(o.dw_init, "gaussian"); !g.empty()) {
    auto v = parse_list(g);
    if (v.size() != 2 || !(v[1] > 0)) throw ConfigError("gaussian initial data needs p0,width");
    rho0 = DensityField{grid, std::vector<double>(grid.n)};
    for (int i = 0; i < grid.n; ++i) {
      const double z = (grid.center(i) - v[0]) / v[1];
      rho0.values[i] = std::exp(-0.5 * z * z);
    }
    const double m = rho0.total_mass();
    for (double& x : rho0.values) x /= m;
  } else {
    throw ConfigError("unknown double-well initial data '" + o.dw_init + "'");
  }

  SolverConfig sc;
  sc.nu = c.nu;
  sc.tau = s.tau;
  sc.scheme_theta = c.scheme_theta;
  sc.tol = c.tol;
  sc.keep_snapshots = false;
  std::vector<DwRecord> rec;
  solve(rho0, c.T, sys.generator(), sc, c.cadence, [&](double t, const DensityField& rho) { rec.push_back(sys(t, rho)); });

  const fs::path dir = c.out;
  CsvTable d{{"t", "m_minus", "m_plus", "mbar_minus", "mbar_plus", "mtilde_minus", "mtilde_plus", "E", "D"}, {}};
  std::vector<double> times;
  for (const auto& r : rec) {
    d.rows.push_back({r.t, r.m.m_minus, r.m.m_plus, r.m.mbar_minus, r.m.mbar_plus, r.m.mtilde_minus, r.m.mtilde_plus,
                      r.E, r.D});
    times.push_back(r.t);
  }
  write_csv(dir / "diagnostics.csv", d);
  const DwMode mode = detect_mode(pot);
  const auto ode = dw_limit_ode(rec.front().m.m_minus, rec.front().m.m_plus, times, mode, s.kappa);
  CsvTable oc{{"t", "m_minus", "m_plus"}, {}};
  for (const auto& p : ode) oc.rows.push_back({p.t, p.m_minus, p.m_plus});
  write_csv(dir / "ode_reference.csv", oc);

  const DwBalance bal = dw_effective_rate(rec, s);
  json scal{{"nu", s.nu},       {"log_mu_minus", s.log_mu_minus}, {"log_mu_plus", s.log_mu_plus},
            {"log_eta", s.log_eta}, {"kappa", s.kappa},         {"tau", s.tau},
            {"theta", s.theta}};
  json meta = run_metadata("doublewell", c);
  meta["scalars"] = scal;
  meta["mode"] = mode == DwMode::Generic ? "generic" : "equal-barriers";
  write_json(dir / "run.json", meta);
  out << json{{"mode", meta["mode"]}, {"kappa", s.kappa}, {"theta", s.theta}, {"balance_max_relative", bal.max_relative}}
             .dump()
      << '\n';
}

void cmd_supercritical(const RunConfig& c, std::ostream& out) {
  const PeriodicPotential pot = make_potential(c.potential);
  const Regime r = classify(pot, c.sigma);
  if (r == Regime::Subcritical || r == Regime::Boundary) throw RegimeError("sigma is not supercritical");
  const BallisticCheck b = ballistic_check(pot, c.sigma, c.nu, c.T, c.periodic_cells, c.fixed_dt, c.cadence);
  const fs::path dir = c.out;
  CsvTable t{{"t", "P", "winding"}, {}};
  for (std::size_t k = 0; k < b.t.size(); ++k) t.rows.push_back({b.t[k], b.P[k], b.winding[k]});
  write_csv(dir / "trajectory.csv", t);
  json summary{{"lambda_quadrature", b.lambda}, {"lambda_measured", b.slope}, {"rel_err", b.rel_err},
               {"c", ballistic_weight(pot, c.sigma, c.nu).c}};
  if (c.printed_sign) summary["lambda_as_printed"] = effective_velocity(pot, c.sigma, VelocitySign::AsPrinted);
  write_json(dir / "summary.json", summary);
  write_json(dir / "run.json", run_metadata("supercritical", c));
  out << summary.dump() << '\n';
}

void cmd_mc(const RunConfig& c, std::ostream& out) {
  const PeriodicPotential pot = make_potential(c.potential);
  McParams p;
  p.sigma = c.sigma;
  p.nu = c.nu;
  p.tau = tau_for(pot, c.sigma, c.nu);
  p.n_particles = c.particles;
  p.T = c.T;
  p.dt = c.mc_dt > 0 ? c.mc_dt : max_stable_dt(pot, c.nu, p.tau);
  if (c.mc_dt <= 0) {
    // largest stable step that divides T
    const double n = std::ceil(c.T / p.dt - 1e-9);
    p.dt = c.T / n;
  }
  p.seed = c.seed;
  p.snapshot_times = c.mc_times.empty() ? std::vector<double>{c.T} : c.mc_times;
  const Ensemble e = simulate(pot, p, Execution::Parallel);

  const fs::path dir = c.out;
  CsvTable h{{"particle", "time", "from", "to"}, {}};
  for (const Hop& x : e.hops)
    h.rows.push_back({static_cast<double>(x.particle), x.time, static_cast<double>(x.from), static_cast<double>(x.to)});
  write_csv(dir / "hops.csv", h);

  const auto occ = occupation_histogram(e, e.cp);
  CsvTable o{{"t", "j", "fraction", "lattice"}, {}};
  for (std::size_t k = 0; k < occ.size(); ++k) {
    const double t = e.snapshot_times[k];
    for (int j = occ[k].j_min; j <= occ[k].j_max(); ++j) {
      double ref;
      if (c.sigma > 0) ref = poisson_kernel(t, j);
      else if (c.sigma < 0) ref = poisson_kernel(t, -j);
      else ref = std::exp(-2 * t) * std::cyl_bessel_i(static_cast<double>(std::abs(j)), 2 * t);
      o.rows.push_back({t, static_cast<double>(j), occ[k].at(j), ref});
    }
  }
  write_csv(dir / "occupation.csv", o);

  const EscapeStatistics st = escape_statistics(e, c.particles);
  json meta = run_metadata("mc", c);
  meta["dt"] = e.dt;
  meta["tau"] = p.tau;
  write_json(dir / "run.json", meta);
  out << json{{"hops", st.hops},
              {"right", st.right},
              {"left", st.left},
              {"mean_residence", st.mean_residence},
              {"time_right", st.time_right},
              {"time_left", st.time_left},
              {"dt", e.dt},
              {"steps", e.steps}}
             .dump()
      << '\n';
}

void cmd_sweep(const RunConfig& c, std::ostream& out) {
  const auto rows = run_convergence_study(c);
  CsvTable t{{"nu", "error", "order", "tau", "theta", "mass_drift"}, {}};
  for (const auto& r : rows) t.rows.push_back({r.nu, r.error, r.order, r.tau, r.theta, r.mass_drift});
  const fs::path dir = c.out;
  write_csv(dir / "convergence.csv", t);
  write_json(dir / "run.json", run_metadata("sweep", c));
  for (std::size_t k = 0; k < t.header.size(); ++k) out << (k ? "," : "") << t.header[k];
  out << '\n';
  for (const auto& r : t.rows) out << series_row_csv(r) << '\n';
}

}  // namespace fpmass
