#include "deit/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "deit/errors.hpp"
#include "deit/units.hpp"

namespace deit {

const std::map<std::string, KeySpec>& config_schema() {
  static const std::map<std::string, KeySpec> s = {
      {"run.preset", {Dim::Text, "custom", "fig2 | phase-shift | state-prep | max-phase | hot-gas | custom"}},
      {"run.tiers", {Dim::Text, "eat", "comma list of sat, eat, num"}},
      {"structure.B", {Dim::Field, "150 G", "magnetic field"}},
      {"structure.constants", {Dim::Text, "builtin", "builtin or path to a constants table"}},
      {"structure.level_map", {Dim::Text, "1=g(1,0) 2=g(2,2) 3=g(2,0) X=g(2,-2) 4=e(2,1) 5=e(2,-1) 6=e(1,1) 7=e(1,-1)", "role assignment"}},
      {"fields.Omega1", {Dim::Frequency, "0.68 MHz", "signal 1 Rabi frequency on |1>-|4>"}},
      {"fields.Omega2", {Dim::Frequency, "-0.55 MHz", "signal 2 Rabi frequency on |2>-|4>"}},
      {"fields.Omegap", {Dim::Frequency, "4.06 MHz", "pump Rabi frequency on |3>-|4>"}},
      {"fields.delta1", {Dim::Frequency, "0 MHz", ""}},
      {"fields.delta2", {Dim::Frequency, "0 MHz", ""}},
      {"fields.deltap", {Dim::Frequency, "0 MHz", ""}},
      {"fields.Delta", {Dim::Frequency, "auto", "auto: from the Zeeman structure"}},
      {"fields.Delta1", {Dim::Frequency, "auto", ""}},
      {"fields.Delta2", {Dim::Frequency, "auto", ""}},
      {"fields.polarization1", {Dim::Number, "1", "mF_e - mF_g"}},
      {"fields.polarization2", {Dim::Number, "-1", ""}},
      {"fields.polarizationp", {Dim::Number, "1", ""}},
      {"medium.density", {Dim::Density, "1e14 cm^-3", ""}},
      {"medium.p1", {Dim::Number, "0.4", ""}},
      {"medium.p2", {Dim::Number, "0.6", ""}},
      {"medium.length", {Dim::Length, "1.6 mm", ""}},
      {"medium.gamma", {Dim::Frequency, "5.73 MHz", "natural linewidth"}},
      {"model.eat_order", {Dim::Text, "full", "full or a truncation order"}},
      {"model.state5_diagonal", {Dim::Text, "tilde", "tilde | plain"}},
      {"model.coupling_ratios", {Dim::Text, "magnitude", "magnitude | signed"}},
      {"model.dipole_basis", {Dim::Text, "zero_field_cg", "zero_field_cg | zeeman_projected"}},
      {"model.projection", {Dim::Text, "scheme", "scheme | all"}},
      {"model.rwa_cutoff", {Dim::Frequency, "2000 MHz", ""}},
      {"integrator.rtol", {Dim::Number, "1e-8", ""}},
      {"integrator.t_end", {Dim::Time, "2 us", ""}},
      {"integrator.dt_out", {Dim::Time, "0.01 us", ""}},
      {"integrator.steady_fraction", {Dim::Number, "0.2", ""}},
      {"prep.raman_efficiency", {Dim::Number, "0, 0.9, 1", "list"}},
      {"prep.pump_duration", {Dim::Time, "2 us", ""}},
      {"prep.pump_rate", {Dim::Frequency, "57.3 MHz", ""}},
      {"prep.repump_rate", {Dim::Frequency, "5.73 MHz", ""}},
      {"prep.repump_set", {Dim::Text, "auto", "auto or space separated g(F,mF)"}},
      {"prep.threshold", {Dim::Number, "0.005", ""}},
      {"pulse.waist", {Dim::Length, "795 nm", ""}},
      {"pulse.photons", {Dim::Number, "1", ""}},
      {"pulse.duration", {Dim::Time, "auto", "auto: minimum duration"}},
      {"pulse.doppler_width", {Dim::Frequency, "500 MHz", ""}},
      {"pulse.rho_k3", {Dim::Number, "auto", "auto: from medium.density"}},
      {"motion.dephasing", {Dim::Frequency, "0 kHz", ""}},
      {"motion.transit", {Dim::Frequency, "0 kHz", ""}},
  };
  return s;
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct Unit {
  const char* name;
  Dim dim;
  double factor;
};

const Unit units[] = {
    {"MHz", Dim::Frequency, mhz(1.0)}, {"kHz", Dim::Frequency, khz(1.0)}, {"Hz", Dim::Frequency, two_pi},
    {"GHz", Dim::Frequency, mhz(1e3)}, {"rad/s", Dim::Frequency, 1.0},  {"G", Dim::Field, 1.0},
    {"cm^-3", Dim::Density, 1e6},      {"m^-3", Dim::Density, 1.0},     {"mm", Dim::Length, 1e-3},
    {"um", Dim::Length, 1e-6},         {"nm", Dim::Length, 1e-9},       {"cm", Dim::Length, 1e-2},
    {"m", Dim::Length, 1.0},           {"us", Dim::Time, 1e-6},         {"ns", Dim::Time, 1e-9},
    {"ms", Dim::Time, 1e-3},           {"s", Dim::Time, 1.0},
};

const char* dim_name(Dim d) {
  switch (d) {
    case Dim::Frequency: return "frequency (MHz, kHz, Hz, GHz, rad/s)";
    case Dim::Field: return "magnetic field (G)";
    case Dim::Density: return "density (cm^-3, m^-3)";
    case Dim::Length: return "length (mm, um, nm, cm, m)";
    case Dim::Time: return "time (us, ns, ms, s)";
    case Dim::Number: return "number";
    case Dim::Text: return "text";
  }
  return "?";
}

std::string where(const std::string& key, const Entry& e) {
  return e.source + ":" + std::to_string(e.line) + ": " + key;
}

} // namespace

double parse_quantity(const std::string& s0, Dim dim, const std::string& at) {
  const std::string s = trim(s0);
  std::istringstream in(s);
  double v;
  if (!(in >> v)) throw ConfigError(at + ": expected a number, got '" + s + "'");
  std::string unit;
  in >> unit;
  std::string extra;
  if (in >> extra) throw ConfigError(at + ": trailing text '" + extra + "'");
  if (unit.empty()) {
    if (dim == Dim::Number) return v;
    throw ConfigError(at + ": missing unit, expected " + dim_name(dim));
  }
  for (const auto& u : units)
    if (unit == u.name) {
      if (u.dim != dim) throw ConfigError(at + ": unit '" + unit + "' is not a " + dim_name(dim));
      return v * u.factor;
    }
  throw ConfigError(at + ": unknown unit '" + unit + "'");
}

std::vector<double> parse_list(const std::string& s, Dim dim, const std::string& at) {
  // "a, b, c unit": the unit after the last item applies to all
  std::vector<std::string> items;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) items.push_back(trim(item));
  if (items.empty() || (items.size() == 1 && items[0].empty())) throw ConfigError(at + ": empty list");
  std::string unit;
  {
    std::istringstream last(items.back());
    double v;
    last >> v >> unit;
  }
  std::vector<double> out;
  for (auto& it : items) {
    if (it.empty()) throw ConfigError(at + ": empty list item");
    std::istringstream one(it);
    double v;
    std::string u;
    one >> v >> u;
    out.push_back(parse_quantity(u.empty() && !unit.empty() ? it + " " + unit : it, dim, at));
  }
  return out;
}

Config Config::parse(const std::string& text, const std::string& source) {
  Config c;
  std::istringstream in(text);
  std::string line, section;
  int n = 0;
  const auto& schema = config_schema();
  while (std::getline(in, line)) {
    ++n;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(source + ":" + std::to_string(n) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(source + ":" + std::to_string(n) + ": expected key = value");
    const std::string k = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError(source + ":" + std::to_string(n) + ": key '" + k + "' outside a section");
    Entry e{v, source, n};
    if (section == "sweep") {
      if (!schema.count(k)) throw ConfigError(source + ":" + std::to_string(n) + ": sweep axis '" + k + "' is not a known key");
      if (v.empty()) throw ConfigError(source + ":" + std::to_string(n) + ": sweep axis '" + k + "' has an empty range");
      c.sweep_.push_back({k, e});
      continue;
    }
    const std::string key = section + "." + k;
    if (!schema.count(key)) throw ConfigError(source + ":" + std::to_string(n) + ": unknown key '" + key + "'");
    c.values_[key] = e;
  }
  // type-check every explicit value now, so errors carry the line
  for (const auto& [k, e] : c.values_) {
    const auto& spec = schema.at(k);
    if (spec.dim == Dim::Text || e.value == "auto") continue;
    if (k == "prep.raman_efficiency") parse_list(e.value, spec.dim, where(k, e));
    else parse_quantity(e.value, spec.dim, where(k, e));
  }
  for (const auto& [k, e] : c.sweep_) parse_list(e.value, schema.at(k).dim, where(k, e));
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path);
}

Config Config::preset(const std::string& name) {
  static const char* known[] = {"fig2", "phase-shift", "state-prep", "max-phase", "hot-gas", "custom"};
  if (std::find(std::begin(known), std::end(known), name) == std::end(known))
    throw ConfigError("unknown preset '" + name + "'");
  return load(std::string(DEIT_PRESET_DIR) + "/" + name + ".cfg");
}

void Config::merge(const Config& over) {
  for (const auto& [k, e] : over.values_) values_[k] = e;
  if (!over.sweep_.empty()) sweep_ = over.sweep_;
}

void Config::set(const std::string& key, const std::string& value, const std::string& source) {
  const auto& schema = config_schema();
  if (!schema.count(key)) throw ConfigError(source + ": unknown key '" + key + "'");
  const Entry e{value, source, 0};
  const Dim dim = schema.at(key).dim;
  if (dim != Dim::Text && value != "auto") {
    if (key == "prep.raman_efficiency") parse_list(value, dim, where(key, e));
    else parse_quantity(value, dim, where(key, e));
  }
  values_[key] = e;
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

std::string Config::text(const std::string& key) const {
  if (auto it = values_.find(key); it != values_.end()) return it->second.value;
  const auto& schema = config_schema();
  if (auto it = schema.find(key); it != schema.end()) return it->second.fallback;
  throw ConfigError("unknown key '" + key + "'");
}

bool Config::is_auto(const std::string& key) const { return text(key) == "auto"; }

double Config::quantity(const std::string& key) const {
  const auto& spec = config_schema().at(key);
  auto it = values_.find(key);
  const Entry e = it != values_.end() ? it->second : Entry{spec.fallback, "default", 0};
  if (e.value == "auto") throw ConfigError(where(key, e) + ": value is 'auto' here");
  return parse_quantity(e.value, spec.dim, where(key, e));
}

std::vector<double> Config::list(const std::string& key) const {
  const auto& spec = config_schema().at(key);
  auto it = values_.find(key);
  const Entry e = it != values_.end() ? it->second : Entry{spec.fallback, "default", 0};
  return parse_list(e.value, spec.dim, where(key, e));
}

std::string Config::dump(const std::string& prefix) const {
  std::ostringstream os;
  for (const auto& [k, spec] : config_schema()) os << prefix << k << " = " << text(k) << "\n";
  for (const auto& [k, e] : sweep_) os << prefix << "sweep." << k << " = " << e.value << "\n";
  return os.str();
}

} // namespace deit
