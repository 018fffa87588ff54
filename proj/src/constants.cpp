#include "deit/constants.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "deit/errors.hpp"
#include "deit/units.hpp"

namespace deit {

double SpectroscopicConstants::omega() const { return two_pi * si::c / wavelength; }
double SpectroscopicConstants::k() const { return two_pi / wavelength; }

const SpectroscopicConstants& rb87_d1() {
  static const SpectroscopicConstants c = [] {
    SpectroscopicConstants s;
    s.version = 1;
    s.nuclear_spin = 1.5;
    s.A_ground = mhz(3417.341305452145);
    s.A_excited = mhz(408.328);
    s.gJ_ground = 2.00233113;
    s.gJ_excited = 0.666;
    s.gI = -0.0009951414;
    s.muB = mhz(1.39962449361);
    s.gamma = mhz(5.73);
    s.wavelength = nm(794.978851156);
    s.reduced_dipole = 2.5377e-29;
    return s;
  }();
  return c;
}

void check(const SpectroscopicConstants& c) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0)) throw ConfigError(std::string("constant must be positive: ") + name);
  };
  positive(c.nuclear_spin, "nuclear_spin");
  positive(c.A_ground, "ground_hyperfine_A_MHz");
  positive(c.A_excited, "excited_hyperfine_A_MHz");
  positive(c.muB, "bohr_magneton_MHz_per_G");
  positive(c.gamma, "natural_linewidth_MHz");
  positive(c.wavelength, "wavelength_nm");
  positive(c.reduced_dipole, "reduced_dipole_Cm");
  if (c.nuclear_spin != 1.5) throw ConfigError("only I = 3/2 is tabulated");
}

SpectroscopicConstants load_constants(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open constants file " + path);
  std::map<std::string, double> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key, rest;
    std::istringstream(line.substr(0, eq)) >> key;
    double v;
    std::istringstream val(line.substr(eq + 1));
    if (!(val >> v))
      throw ConfigError(path + ":" + std::to_string(lineno) + ": bad number for " + key);
    kv[key] = v;
  }
  auto get = [&](const char* k) {
    auto it = kv.find(k);
    if (it == kv.end()) throw ConfigError(path + ": missing key " + k);
    return it->second;
  };
  SpectroscopicConstants s;
  s.version = static_cast<int>(get("version"));
  s.nuclear_spin = get("nuclear_spin");
  s.A_ground = mhz(get("ground_hyperfine_A_MHz"));
  s.A_excited = mhz(get("excited_hyperfine_A_MHz"));
  s.gJ_ground = get("ground_gJ");
  s.gJ_excited = get("excited_gJ");
  s.gI = get("nuclear_gI");
  s.muB = mhz(get("bohr_magneton_MHz_per_G"));
  s.gamma = mhz(get("natural_linewidth_MHz"));
  s.wavelength = nm(get("wavelength_nm"));
  s.reduced_dipole = get("reduced_dipole_Cm");
  check(s);
  return s;
}

} // namespace deit
