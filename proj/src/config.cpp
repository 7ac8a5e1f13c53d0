#include "fpmass/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "fpmass/errors.hpp"

namespace fpmass {

using nlohmann::json;

namespace {

template <class T>
void take(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw ConfigError("unknown config key '" + it.key() + "' in " + where);
}

}  // namespace

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j,
                 {"potential", "regime", "sigma", "nu", "nu_list", "solver", "init", "lattice", "doublewell",
                  "supercritical", "mc", "out", "seed"},
                 "top level");
  RunConfig c;
  if (j.contains("potential")) {
    const json& p = j["potential"];
    reject_unknown(p, {"kind", "amplitude", "period", "g", "file"}, "potential");
    take(p, "kind", c.potential.kind);
    take(p, "amplitude", c.potential.amplitude);
    take(p, "period", c.potential.period);
    take(p, "g", c.potential.g);
    take(p, "file", c.potential.file);
  }
  take(j, "regime", c.regime);
  take(j, "sigma", c.sigma);
  take(j, "nu", c.nu);
  take(j, "nu_list", c.nu_list);
  take(j, "init", c.init);
  take(j, "out", c.out);
  take(j, "seed", c.seed);
  if (j.contains("solver")) {
    const json& s = j["solver"];
    reject_unknown(s, {"wells", "cells_per_well", "T", "cadence", "tol", "theta"}, "solver");
    if (s.contains("wells")) {
      std::vector<int> w;
      take(s, "wells", w);
      if (w.size() != 2) throw ConfigError("solver.wells must be [lo, hi]");
      c.well_lo = w[0];
      c.well_hi = w[1];
    }
    take(s, "cells_per_well", c.cells_per_well);
    take(s, "T", c.T);
    take(s, "cadence", c.cadence);
    take(s, "tol", c.tol);
    take(s, "theta", c.scheme_theta);
  }
  if (j.contains("lattice")) {
    const json& l = j["lattice"];
    reject_unknown(l, {"direction", "kappa", "method", "x_profile"}, "lattice");
    take(l, "direction", c.direction);
    take(l, "kappa", c.kappa);
    take(l, "method", c.method);
    take(l, "x_profile", c.x_profile);
  }
  if (j.contains("doublewell")) {
    const json& d = j["doublewell"];
    reject_unknown(d, {"family", "params", "cells_per_nu"}, "doublewell");
    take(d, "family", c.dw_family);
    take(d, "params", c.dw_params);
    take(d, "cells_per_nu", c.cells_per_nu);
  }
  if (j.contains("supercritical")) {
    const json& d = j["supercritical"];
    reject_unknown(d, {"cells", "dt", "printed_sign"}, "supercritical");
    take(d, "cells", c.periodic_cells);
    take(d, "dt", c.fixed_dt);
    take(d, "printed_sign", c.printed_sign);
  }
  if (j.contains("mc")) {
    const json& m = j["mc"];
    reject_unknown(m, {"particles", "dt", "times"}, "mc");
    take(m, "particles", c.particles);
    take(m, "dt", c.mc_dt);
    take(m, "times", c.mc_times);
  }
  return c;
}

json config_to_json(const RunConfig& c) {
  json p = {{"kind", c.potential.kind}, {"amplitude", c.potential.amplitude}, {"period", c.potential.period}};
  if (!c.potential.g.empty()) p["g"] = c.potential.g;
  if (!c.potential.file.empty()) p["file"] = c.potential.file;
  return json{{"potential", p},
              {"regime", c.regime},
              {"sigma", c.sigma},
              {"nu", c.nu},
              {"nu_list", c.nu_list},
              {"init", c.init},
              {"out", c.out},
              {"seed", c.seed},
              {"solver",
               {{"wells", {c.well_lo, c.well_hi}},
                {"cells_per_well", c.cells_per_well},
                {"T", c.T},
                {"cadence", c.cadence},
                {"tol", c.tol},
                {"theta", c.scheme_theta}}},
              {"lattice", {{"direction", c.direction}, {"kappa", c.kappa}, {"method", c.method}, {"x_profile", c.x_profile}}},
              {"doublewell", {{"family", c.dw_family}, {"params", c.dw_params}, {"cells_per_nu", c.cells_per_nu}}},
              {"supercritical", {{"cells", c.periodic_cells}, {"dt", c.fixed_dt}, {"printed_sign", c.printed_sign}}},
              {"mc", {{"particles", c.particles}, {"dt", c.mc_dt}, {"times", c.mc_times}}}};
}

RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file " + file.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  // run.json written by a previous run carries its config under "config"
  if (j.is_object() && j.contains("program") && j.contains("config")) return config_from_json(j["config"]);
  return config_from_json(j);
}

PeriodicPotential make_potential(const PotentialSpec& s) {
  if (s.kind == "cosine") return make_cosine(s.amplitude, s.period);
  if (s.kind == "g_of_sin") return make_g_of_sin(s.g);
  if (s.kind == "table") return load_tabulated_csv(s.file, s.period);
  throw ConfigError("unknown potential kind '" + s.kind + "'");
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t pos;
      v.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("not a number: '" + item + "'");
    }
  }
  return v;
}

PotentialSpec parse_potential_flag(const std::string& s) {
  PotentialSpec p;
  const auto colon = s.find(':');
  p.kind = s.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : s.substr(colon + 1);
  if (p.kind == "cosine") {
    auto v = parse_list(rest);
    if (v.size() >= 1) p.amplitude = v[0];
    if (v.size() >= 2) p.period = v[1];
  } else if (p.kind == "g_of_sin") {
    p.g = parse_list(rest);
  } else if (p.kind == "table") {
    const auto c2 = rest.rfind(':');
    if (c2 == std::string::npos) throw ConfigError("table potential flag is table:file:period");
    p.file = rest.substr(0, c2);
    p.period = parse_list(rest.substr(c2 + 1)).at(0);
  } else {
    throw ConfigError("unknown potential kind '" + p.kind + "'");
  }
  return p;
}

DoubleWellPotential make_double_well(const RunConfig& c) {
  if (c.dw_family == "quartic") return make_symmetric_quartic();
  if (c.dw_family == "blended") {
    if (c.dw_params.size() != 5) throw ConfigError("blended double well needs h-, h+, omega0, omega-, omega+");
    const auto& q = c.dw_params;
    return make_blended(q[0], q[1], q[2], q[3], q[4]);
  }
  throw ConfigError("unknown double-well family '" + c.dw_family + "'");
}

void validate(const RunConfig& c) {
  if (!(c.nu > 0)) throw ConfigError("nu must be positive");
  for (double v : c.nu_list)
    if (!(v > 0)) throw ConfigError("nu_list entries must be positive");
  if (c.cells_per_well < 16) throw ConfigError("cells_per_well must be at least 16");
  if (c.well_hi < c.well_lo) throw ConfigError("empty well window");
  if (!(c.T >= 0)) throw ConfigError("T must be nonnegative");
  if (!(c.cadence > 0)) throw ConfigError("cadence must be positive");
  if (!(c.tol > 0)) throw ConfigError("tol must be positive");
  if (c.scheme_theta < 0.5 || c.scheme_theta > 1) throw ConfigError("theta must lie in [1/2, 1]");
  if (c.regime == "doublewell") return;
  if (c.regime != "subcritical" && c.regime != "supercritical") throw ConfigError("unknown regime '" + c.regime + "'");
  const PeriodicPotential pot = make_potential(c.potential);
  const Regime r = classify(pot, c.sigma);
  if (c.regime == "subcritical" && r != Regime::Subcritical)
    throw RegimeError("sigma is not inside the subcritical interval of the potential");
  if (c.regime == "supercritical" && (r == Regime::Subcritical || r == Regime::Boundary))
    throw RegimeError("sigma is not supercritical for the potential");
}

std::uint64_t config_hash(const json& j) {
  // where the results go does not change them
  json k = j;
  if (k.is_object()) k.erase("out");
  const std::string s = k.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace fpmass
