#include "respa/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "respa/units.hpp"

namespace respa {

namespace pt = boost::property_tree;

DriveTone PumpSetting::tone() const {
  return {ghz_to_rad(freq_ghz), dbm_to_watts(power_dbm), deg_to_rad(phase_deg)};
}

std::vector<double> SweepSetting::omega_grid() const {
  if (points < 1) throw Error("config", "sweep needs at least one point");
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) grid[static_cast<std::size_t>(i)] = ghz_to_rad(start_ghz) + i * step();
  return grid;
}

double SweepSetting::step() const {
  return points > 1 ? ghz_to_rad(stop_ghz - start_ghz) / (points - 1) : 0.0;
}

HbSettings SolverSetting::hb() const {
  HbSettings s;
  s.tol = tol;
  s.continuation_steps = continuation_steps;
  s.bifurcation_ratio = bifurcation_ratio;
  return s;
}

std::vector<DriveTone> ExperimentConfig::drive_tones() const {
  std::vector<DriveTone> tones;
  for (const auto& p : pumps) tones.push_back(p.tone());
  return tones;
}

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds = {"resonances",  "pump-solve",     "gain-sweep",
                                                 "wide-scan",   "phase-sweep",    "sensitivity",
                                                 "cross-harmonic", "oracle-check", "tune"};
  return kinds;
}

namespace {

const std::map<std::string, std::vector<std::string>>& required_sections() {
  static const std::map<std::string, std::vector<std::string>> req = {
      {"resonances", {"geometry"}},
      {"pump-solve", {"geometry", "pumps", "solver"}},
      {"gain-sweep", {"geometry", "pumps", "sweep", "solver"}},
      {"wide-scan", {"geometry", "pumps", "sweep", "solver"}},
      {"phase-sweep", {"geometry", "pumps", "sweep", "solver"}},
      {"sensitivity", {"geometry", "pumps", "sweep", "solver", "sensitivity"}},
      {"cross-harmonic", {"geometry", "pumps", "sweep", "solver"}},
      {"oracle-check", {"geometry", "pumps", "sweep", "solver", "oracle"}},
      {"tune", {"geometry", "pumps", "sweep", "solver", "tune"}},
  };
  return req;
}

double number(const pt::ptree& tree, const std::string& key, double fallback) {
  auto v = tree.get_optional<std::string>(key);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    const double x = std::stod(*v, &used);
    if (used != v->size()) throw std::invalid_argument(*v);
    return x;
  } catch (const std::exception&) {
    throw Error("config", "key '" + key + "' is not a number: " + *v);
  }
}

int integer(const pt::ptree& tree, const std::string& key, int fallback) {
  const double x = number(tree, key, fallback);
  if (x != static_cast<int>(x)) throw Error("config", "key '" + key + "' must be an integer");
  return static_cast<int>(x);
}

std::vector<int> int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (item.empty()) continue;
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw Error("config", "invalid harmonic list entry: " + item);
    }
  }
  return out;
}

// Shortest text that parses back to the same double.
std::string fmt(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

PumpSetting read_pump(const pt::ptree& tree, const std::string& prefix) {
  PumpSetting p;
  p.freq_ghz = number(tree, prefix + "_freq_ghz", 0.0);
  p.power_dbm = number(tree, prefix + "_power_dbm", -200.0);
  p.phase_deg = number(tree, prefix + "_phase_deg", 0.0);
  return p;
}

}  // namespace

ExperimentConfig parse_config(std::istream& is) {
  pt::ptree root;
  try {
    pt::read_ini(is, root);
  } catch (const pt::ini_parser_error& e) {
    throw Error("config", std::string("malformed config: ") + e.what());
  }
  ExperimentConfig c;
  const pt::ptree empty;
  auto section = [&](const char* name) -> const pt::ptree& {
    auto s = root.get_child_optional(name);
    return s ? *s : empty;
  };

  const pt::ptree& exp = section("experiment");
  c.kind = exp.get<std::string>("kind", "");
  const auto& kinds = experiment_kinds();
  if (std::find(kinds.begin(), kinds.end(), c.kind) == kinds.end())
    throw Error("config", "unknown or missing experiment kind '" + c.kind + "'");
  for (const auto& s : required_sections().at(c.kind))
    if (!root.get_child_optional(s)) throw Error("config", "kind '" + c.kind + "' needs a [" + s + "] section");
  c.name = exp.get<std::string>("name", "");
  c.n_max = integer(exp, "n_max", 4);
  c.harmonics = int_list(exp.get<std::string>("modes", ""));
  if (c.harmonics.empty())
    for (int n = 1; n <= c.n_max; ++n) c.harmonics.push_back(n);

  const pt::ptree& g = section("geometry");
  c.geometry.length = number(g, "length_m", 0.0);
  c.geometry.l_per_len = number(g, "l_per_len_h_per_m", 0.0);
  c.geometry.c_per_len = number(g, "c_per_len_f_per_m", 0.0);
  c.geometry.c_couple_in = number(g, "c_couple_in_f", 0.0);
  c.geometry.c_couple_out = number(g, "c_couple_out_f", 0.0);
  c.geometry.q_internal = number(g, "q_internal", 1.0);
  c.geometry.z_env = number(g, "z_env_ohm", 50.0);
  c.geometry.i_star = number(g, "i_star_a", std::numeric_limits<double>::infinity());
  c.geometry.validate();

  const pt::ptree& p = section("pumps");
  const int count = integer(p, "count", 0);
  if (root.get_child_optional("pumps") && (count < 1 || count > 2))
    throw Error("config", "[pumps] count must be 1 or 2");
  for (int i = 1; i <= count; ++i) c.pumps.push_back(read_pump(p, "pump" + std::to_string(i)));

  const pt::ptree& s = section("sweep");
  c.sweep.start_ghz = number(s, "start_ghz", 0.0);
  c.sweep.stop_ghz = number(s, "stop_ghz", 0.0);
  c.sweep.points = integer(s, "points", 2001);
  c.sweep.theta_points = integer(s, "theta_points", 181);

  const pt::ptree& v = section("solver");
  c.solver.comb_order = integer(v, "comb_order", 3);
  c.solver.sideband_order = integer(v, "sideband_order", 1);
  c.solver.tol = number(v, "tol", 1e-10);
  c.solver.continuation_steps = integer(v, "continuation_steps", 24);
  c.solver.bifurcation_ratio = number(v, "bifurcation_ratio", 1e-3);
  c.solver.merge_tol_hz = number(v, "merge_tol_hz", 0.0);

  const pt::ptree& t = section("tune");
  c.tune.target_db = number(t, "target_db", 20.0);
  c.tune.span_mhz = number(t, "span_mhz", 2.0);
  c.tune.points = integer(t, "points", 81);
  c.tune.power_step_db = number(t, "power_step_db", 0.25);
  c.tune.max_power_steps = integer(t, "max_power_steps", 24);

  const pt::ptree& o = section("oracle");
  c.oracle.probes = integer(o, "probes", 11);
  c.oracle.probe_dbc = number(o, "probe_dbc", -60.0);
  c.oracle.beat_mhz = number(o, "beat_mhz", 0.2);
  c.oracle.periods = integer(o, "periods", 50);
  c.oracle.transient = number(o, "transient", 300.0);

  const pt::ptree& z = section("sensitivity");
  c.sensitivity.freq_step_mhz = number(z, "freq_step_mhz", 0.05);
  c.sensitivity.power_step_db = number(z, "power_step_db", 0.05);
  c.sensitivity.degenerate = read_pump(z, "degenerate");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("config", "cannot open config file " + path);
  return parse_config(in);
}

void write_config(const ExperimentConfig& c, std::ostream& os) {
  auto kv = [&](const std::string& k, const std::string& v) { os << k << " = " << v << '\n'; };
  auto pump = [&](const std::string& prefix, const PumpSetting& p) {
    kv(prefix + "_freq_ghz", fmt(p.freq_ghz));
    kv(prefix + "_power_dbm", fmt(p.power_dbm));
    kv(prefix + "_phase_deg", fmt(p.phase_deg));
  };
  std::string modes;
  for (std::size_t i = 0; i < c.harmonics.size(); ++i) modes += (i ? "," : "") + std::to_string(c.harmonics[i]);

  os << "[experiment]\n";
  kv("kind", c.kind);
  if (!c.name.empty()) kv("name", c.name);
  kv("n_max", std::to_string(c.n_max));
  kv("modes", modes);

  os << "\n[geometry]\n";
  kv("length_m", fmt(c.geometry.length));
  kv("l_per_len_h_per_m", fmt(c.geometry.l_per_len));
  kv("c_per_len_f_per_m", fmt(c.geometry.c_per_len));
  kv("c_couple_in_f", fmt(c.geometry.c_couple_in));
  kv("c_couple_out_f", fmt(c.geometry.c_couple_out));
  kv("q_internal", fmt(c.geometry.q_internal));
  kv("z_env_ohm", fmt(c.geometry.z_env));
  kv("i_star_a", fmt(c.geometry.i_star));

  if (!c.pumps.empty()) {
    os << "\n[pumps]\n";
    kv("count", std::to_string(c.pumps.size()));
    for (std::size_t i = 0; i < c.pumps.size(); ++i) pump("pump" + std::to_string(i + 1), c.pumps[i]);
  }

  os << "\n[sweep]\n";
  kv("start_ghz", fmt(c.sweep.start_ghz));
  kv("stop_ghz", fmt(c.sweep.stop_ghz));
  kv("points", std::to_string(c.sweep.points));
  kv("theta_points", std::to_string(c.sweep.theta_points));

  os << "\n[solver]\n";
  kv("comb_order", std::to_string(c.solver.comb_order));
  kv("sideband_order", std::to_string(c.solver.sideband_order));
  kv("tol", fmt(c.solver.tol));
  kv("continuation_steps", std::to_string(c.solver.continuation_steps));
  kv("bifurcation_ratio", fmt(c.solver.bifurcation_ratio));
  kv("merge_tol_hz", fmt(c.solver.merge_tol_hz));

  os << "\n[tune]\n";
  kv("target_db", fmt(c.tune.target_db));
  kv("span_mhz", fmt(c.tune.span_mhz));
  kv("points", std::to_string(c.tune.points));
  kv("power_step_db", fmt(c.tune.power_step_db));
  kv("max_power_steps", std::to_string(c.tune.max_power_steps));

  os << "\n[oracle]\n";
  kv("probes", std::to_string(c.oracle.probes));
  kv("probe_dbc", fmt(c.oracle.probe_dbc));
  kv("beat_mhz", fmt(c.oracle.beat_mhz));
  kv("periods", std::to_string(c.oracle.periods));
  kv("transient", fmt(c.oracle.transient));

  os << "\n[sensitivity]\n";
  kv("freq_step_mhz", fmt(c.sensitivity.freq_step_mhz));
  kv("power_step_db", fmt(c.sensitivity.power_step_db));
  pump("degenerate", c.sensitivity.degenerate);
}

std::string config_to_string(const ExperimentConfig& config) {
  std::ostringstream os;
  write_config(config, os);
  return os.str();
}

}  // namespace respa
