#include "deit/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numbers>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include "deit/errors.hpp"

namespace deit {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    const auto a = item.find_first_not_of(" \t");
    if (a == std::string::npos) continue;
    out.push_back(item.substr(a, item.find_last_not_of(" \t") - a + 1));
  }
  return out;
}

LevelKey parse_level(const std::string& s, const std::string& where) {
  static const std::regex re(R"(([ge])\((\d)'?,\s*([+-]?\d)\))");
  std::smatch m;
  if (!std::regex_match(s, m, re)) throw ConfigError(where + ": cannot parse level '" + s + "', expected g(F,mF) or e(F',mF)");
  return {m[1] == "g" ? Manifold::S12 : Manifold::P12, std::stoi(m[2]), std::stoi(m[3])};
}

std::set<std::string> tiers_of(const Config& c) {
  const auto p = c.text("run.preset");
  if (p == "fig2") return {"sat", "eat", "num"};
  if (p == "phase-shift") return {"sat", "eat"};
  std::set<std::string> t;
  for (const auto& x : split(c.text("run.tiers"), ',')) {
    if (x != "sat" && x != "eat" && x != "num") throw ConfigError("run.tiers: unknown tier '" + x + "'");
    t.insert(x);
  }
  return t;
}

double frequency_or(const Config& c, const std::string& key, double fallback) {
  return c.is_auto(key) ? fallback : c.quantity(key);
}

int polarization(const Config& c, const std::string& key) {
  const double v = c.quantity(key);
  if (v != -1 && v != 0 && v != 1) throw ConfigError(key + ": polarization must be -1, 0 or +1");
  return static_cast<int>(v);
}

void add_summary(PointResult& r, const std::string& tier, const XpmSummary& s, const XpmSeries& series) {
  for (int f = 0; f < 2; ++f) {
    const std::string i = std::to_string(f + 1);
    r.values.push_back({tier + "_phi" + i, s.phi[f]});
    r.values.push_back({tier + "_attenuation_on" + i, s.attenuation_on[f]});
    r.values.push_back({tier + "_attenuation_off" + i, s.attenuation_off[f]});
    r.values.push_back({tier + "_coeff" + i + "_cm2_per_W", to_cm2_per_w(s.coeff[f])});
    r.values.push_back({tier + "_dxpm" + i + "_ea0", s.dxpm[f].mean});
    r.values.push_back({tier + "_dxpm" + i + "_drift", s.dxpm[f].drift});
    r.values.push_back({tier + "_onset" + i + "_us", onset_time(series.t, series.dxpm(f), s.dxpm[f].mean) / us(1.0)});
    if (!s.dxpm[f].converged) r.notes.push_back(tier + " d_XPM" + i + " not stationary over the averaging window");
  }
}

void xpm_point(const Config& c, PointResult& r) {
  const auto tiers = tiers_of(c);
  const auto times = config_times(c);
  const double L = c.quantity("medium.length");
  const double omega = config_constants(c).omega();
  const double frac = c.quantity("integrator.steady_fraction");
  Table ts{"dxpm_series", {"t_us"}, {}};
  std::vector<std::vector<double>> cols;

  if (tiers.count("sat")) {
    const auto fs = config_fieldset(c);
    const auto m = config_medium(c);
    const double I1 = intensity(fs.amplitude[0]), I2 = intensity(fs.amplitude[1]);
    const auto on = sat_indices(m, 0, 0, 0, I1, I2);
    const auto off1 = sat_indices(m, 0, 0, 0, I1, 0.0), off2 = sat_indices(m, 0, 0, 0, 0.0, I2);
    const double s1 = sat_cross_dipole(m, fs.amplitude[0], fs.amplitude[1], Field::Signal1);
    const double s2 = sat_cross_dipole(m, fs.amplitude[0], fs.amplitude[1], Field::Signal2);
    r.values.push_back({"sat_phi1", xpm_phase(on.n1, off1.n1, L, omega).phase});
    r.values.push_back({"sat_phi2", xpm_phase(on.n2, off2.n2, L, omega).phase});
    r.values.push_back({"sat_dxpm1_ea0", s1});
    r.values.push_back({"sat_dxpm2_ea0", s2});
    ts.columns.insert(ts.columns.end(), {"sat_dxpm1_ea0", "sat_dxpm2_ea0"});
    cols.push_back(std::vector<double>(times.size(), s1));
    cols.push_back(std::vector<double>(times.size(), s2));
  }
  if (tiers.count("eat")) {
    const auto series = eat_cross_dipole(config_eat(c), times);
    auto s = summarize(series, L, omega);
    for (int f = 0; f < 2; ++f) s.dxpm[f] = steady_state(series.t, series.dxpm(f), frac);
    add_summary(r, "eat", s, series);
    ts.columns.insert(ts.columns.end(), {"eat_dxpm1_ea0", "eat_dxpm2_ea0"});
    cols.push_back(series.dxpm(0));
    cols.push_back(series.dxpm(1));
  }
  if (tiers.count("num")) {
    const auto cfg = config_num(c);
    const auto full = build_full_d1(cfg.d1, config_constants(c));
    const auto run = num_cross_dipole(cfg, config_initial_state(c, full), times);
    auto s = summarize(run.series, L, omega);
    for (int f = 0; f < 2; ++f) s.dxpm[f] = steady_state(run.series.t, run.series.dxpm(f), frac);
    add_summary(r, "num", s, run.series);
    const auto& last = run.on.states.back();
    r.values.push_back({"num_population_X", last.population(run.scheme_on.role.at("X"))});
    r.values.push_back({"num_population_3", last.population(run.scheme_on.role.at("3"))});
    r.values.push_back({"num_trace_error", run.on.max_trace_error});
    r.values.push_back({"num_hermiticity_error", run.on.max_hermiticity_error});
    r.values.push_back({"num_min_eigenvalue", run.on.min_eigenvalue});
    ts.columns.insert(ts.columns.end(), {"num_dxpm1_ea0", "num_dxpm2_ea0"});
    cols.push_back(run.series.dxpm(0));
    cols.push_back(run.series.dxpm(1));
  }
  if (cols.empty()) return;
  for (size_t k = 0; k < times.size(); ++k) {
    std::vector<double> row{times[k] / us(1.0)};
    for (const auto& col : cols) row.push_back(col[k]);
    ts.rows.push_back(std::move(row));
  }
  r.tables.push_back(std::move(ts));
}

void state_prep_point(const Config& c, PointResult& r) {
  const auto k = config_constants(c);
  const double B = c.quantity("structure.B");
  PrepConfig prep;
  prep.pump_duration = c.quantity("prep.pump_duration");
  prep.pump_rate = c.quantity("prep.pump_rate");
  prep.repump_rate = c.quantity("prep.repump_rate");
  prep.threshold = c.quantity("prep.threshold");
  prep.basis = dipole_basis_from_string(c.text("model.dipole_basis"));
  prep.map = config_level_map(c);
  if (!c.is_auto("prep.repump_set"))
    for (const auto& s : split(c.text("prep.repump_set"), ' ')) prep.repump_set.push_back(parse_level(s, "prep.repump_set"));

  auto m = config_medium(c);
  const auto dip = eat_dipoles(prep.basis, B, prep.map, k);
  m.d41 = std::abs(dip.d41);
  m.d42 = std::abs(dip.d42);
  // decay out of |4> splits as |d_4i|^2 in the dipole basis used for pumping
  const double b1 = dip.d41 * dip.d41, b2 = dip.d42 * dip.d42;

  Table t{"state_prep",
          {"epsilon", "p1", "p2", "outside", "pump_time_us", "branch1", "branch2", "vg1_m_per_s", "vg2_m_per_s",
           "vg_mismatch"},
          {}};
  Table pops{"populations", {"epsilon"}, {}};
  for (double eps : c.list("prep.raman_efficiency")) {
    prep.raman_efficiency = eps;
    const auto res = prepare_mixture(prep, B, k);
    m.p1 = res.p1;
    m.p2 = res.p2;
    const double v1 = group_velocity(eta(1, m), k.omega()), v2 = group_velocity(eta(2, m), k.omega());
    t.rows.push_back({eps, res.p1, res.p2, res.outside, res.time / us(1.0), b1 / (b1 + b2), b2 / (b1 + b2), v1, v2,
                      std::max(v1, v2) / std::min(v1, v2) - 1});
    if (pops.columns.size() == 1) pops.columns.insert(pops.columns.end(), res.labels.begin(), res.labels.end());
    std::vector<double> row{eps};
    for (int i = 0; i < res.rho.dimension(); ++i) row.push_back(res.rho.population(i));
    pops.rows.push_back(std::move(row));
  }
  r.tables.push_back(std::move(t));
  r.tables.push_back(std::move(pops));
}

struct Estimate {
  double lambda, w0, gamma, Delta, rho_k3, density;
  MaxPhase closed;
  PhasePipeline pipe;
  double window, doppler;
};

Estimate estimate(const Config& c) {
  const auto k = config_constants(c);
  Estimate e{};
  e.lambda = k.wavelength;
  e.w0 = c.quantity("pulse.waist");
  e.gamma = c.quantity("medium.gamma");
  e.Delta = config_detunings(c).Delta;
  const double kk = k.k();
  if (c.is_auto("pulse.rho_k3")) {
    e.density = c.quantity("medium.density");
    e.rho_k3 = e.density / (kk * kk * kk);
  } else {
    e.rho_k3 = c.quantity("pulse.rho_k3");
    e.density = e.rho_k3 * kk * kk * kk;
  }
  e.closed = max_phase_shift(e.lambda, e.w0, e.gamma, e.Delta, e.density);
  // closed transition whose natural width is gamma
  const double d = std::sqrt(3 * std::numbers::pi * si::eps0 * si::hbar * e.gamma / (kk * kk * kk));
  const double Op = std::abs(config_fieldset(c).Op);
  e.pipe = max_phase_pipeline(e.lambda, e.w0, e.Delta, e.density, d, Op, 1.0);
  e.window = transparency_window(Op, e.gamma);
  e.doppler = doppler_window(Op, c.quantity("pulse.doppler_width"));
  return e;
}

void max_phase_point(const Config& c, PointResult& r) {
  const auto e = estimate(c);
  r.values = {{"lambda_nm", e.lambda / nm(1.0)},
              {"w0_nm", e.w0 / nm(1.0)},
              {"gamma_over_Delta", e.gamma / e.Delta},
              {"rho_k3", e.rho_k3},
              {"phi_max", e.closed.phi},
              {"phi_max_magnitude", e.closed.magnitude},
              {"phi_pipeline", e.pipe.phi},
              {"T_min_us", e.pipe.T / us(1.0)},
              {"L_um", e.pipe.L / 1e-6},
              {"E_max_V_per_m", e.pipe.E_max},
              {"window_MHz", to_mhz(e.window)},
              {"doppler_window_MHz", to_mhz(e.doppler)}};
  r.notes = e.closed.warnings;
}

void hot_gas_point(const Config& base, PointResult& r) {
  const auto k = config_constants(base);
  const double L = base.quantity("medium.length");
  const auto fs = config_fieldset(base);

  // both signals are pulses of the given photon number; their peak fields set the couplings
  PulseSpec p{base.quantity("pulse.waist"), 0.0, k.wavelength, base.quantity("pulse.photons")};
  p.T = base.is_auto("pulse.duration") ? 1.0 / doppler_window(std::abs(fs.Op), base.quantity("pulse.doppler_width"))
                                       : base.quantity("pulse.duration");
  const double E = std::sqrt(p.photon_number) * e_max(p);
  const double O1 = std::copysign(std::abs(fs.dip.d41) * E / si::hbar, base.quantity("fields.Omega1"));
  const double O2 = std::copysign(std::abs(fs.dip.d42) * E / si::hbar, base.quantity("fields.Omega2"));
  Config c = base;
  c.set("fields.Omega1", format_number(O1) + " rad/s", "pulse");
  c.set("fields.Omega2", format_number(O2) + " rad/s", "pulse");

  const auto times = config_times(c);
  const auto cfg = config_num(c);
  const auto full = build_full_d1(cfg.d1, k);
  const auto run = num_cross_dipole(cfg, config_initial_state(c, full), times);
  auto s = summarize(run.series, L, k.omega());
  for (int f = 0; f < 2; ++f) s.dxpm[f] = steady_state(run.series.t, run.series.dxpm(f), c.quantity("integrator.steady_fraction"));
  r.values.push_back({"pulse_T_us", p.T / us(1.0)});
  r.values.push_back({"pulse_peak_field_V_per_m", E});
  r.values.push_back({"pulse_peak_intensity_W_per_m2", intensity(E)});
  r.values.push_back({"Omega1_MHz", to_mhz(O1)});
  r.values.push_back({"Omega2_MHz", to_mhz(O2)});
  add_summary(r, "num", s, run.series);
  r.values.push_back({"num_trace_error", run.on.max_trace_error});
  r.values.push_back({"num_min_eigenvalue", run.on.min_eigenvalue});
}

std::string header(const Config& c) {
  return "# deit resolved configuration\n" + c.dump("# ");
}

std::string csv_table(const std::string& head, const std::vector<std::string>& cols,
                      const std::vector<std::vector<std::string>>& rows) {
  std::string out = head;
  for (size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
    out += "\n";
  }
  return out;
}

} // namespace

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

SpectroscopicConstants config_constants(const Config& c) {
  const auto src = c.text("structure.constants");
  auto k = src == "builtin" ? rb87_d1() : load_constants(src);
  k.gamma = c.quantity("medium.gamma");
  return k;
}

LevelMap config_level_map(const Config& c) {
  LevelMap m;
  std::set<std::string> seen;
  for (const auto& tok : split(c.text("structure.level_map"), ' ')) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw ConfigError("structure.level_map: expected role=level, got '" + tok + "'");
    const auto role = tok.substr(0, eq);
    const auto key = parse_level(tok.substr(eq + 1), "structure.level_map");
    const bool ground = key.manifold == Manifold::S12;
    LevelKey* dst = nullptr;
    if (role == "1" && ground) dst = &m.s1;
    else if (role == "2" && ground) dst = &m.s2;
    else if (role == "3" && ground) dst = &m.s3;
    else if (role == "X" && ground) dst = &m.x;
    else if (role == "4" && !ground) dst = &m.s4;
    else if (role == "5" && !ground) dst = &m.s5;
    else if (role == "6" && !ground) dst = &m.s6;
    else if (role == "7" && !ground) dst = &m.s7;
    if (!dst) throw ConfigError("structure.level_map: role '" + role + "' cannot be assigned to " + to_string(key));
    if (!seen.insert(role).second) throw ConfigError("structure.level_map: role '" + role + "' assigned twice");
    *dst = key;
  }
  return m;
}

Detunings config_detunings(const Config& c) {
  const double d1 = c.quantity("fields.delta1"), d2 = c.quantity("fields.delta2"), dp = c.quantity("fields.deltap");
  auto det = detunings_at(c.quantity("structure.B"), d1, d2, dp, config_level_map(c), config_constants(c));
  det.Delta = frequency_or(c, "fields.Delta", det.Delta);
  det.Delta1 = frequency_or(c, "fields.Delta1", det.Delta1);
  det.Delta2 = frequency_or(c, "fields.Delta2", det.Delta2);
  return det;
}

FieldSet config_fieldset(const Config& c) {
  const auto basis = dipole_basis_from_string(c.text("model.dipole_basis"));
  const auto dip = eat_dipoles(basis, c.quantity("structure.B"), config_level_map(c), config_constants(c));
  const auto ratios = c.text("model.coupling_ratios");
  if (ratios != "magnitude" && ratios != "signed") throw ConfigError("model.coupling_ratios must be magnitude or signed");
  return make_fieldset(c.quantity("fields.Omega1"), c.quantity("fields.Omega2"), c.quantity("fields.Omegap"),
                       config_detunings(c), dip, ratios == "signed");
}

EatRunConfig config_eat(const Config& c) {
  EatRunConfig e;
  e.fields = config_fieldset(c);
  e.gamma = c.quantity("medium.gamma");
  e.p1 = c.quantity("medium.p1");
  e.p2 = c.quantity("medium.p2");
  e.density = c.quantity("medium.density");
  const auto s5 = c.text("model.state5_diagonal");
  if (s5 != "tilde" && s5 != "plain") throw ConfigError("model.state5_diagonal must be tilde or plain");
  e.s5 = s5 == "tilde" ? State5Diagonal::Tilde : State5Diagonal::Plain;
  const auto order = c.text("model.eat_order");
  if (order != "full") {
    try {
      size_t used = 0;
      const int n = std::stoi(order, &used);
      if (used != order.size() || n < 1) throw ConfigError("");
      e.options.order = n;
    } catch (const std::exception&) {
      throw ConfigError("model.eat_order must be 'full' or a positive integer, got '" + order + "'");
    }
  }
  e.options.ode.rtol = c.quantity("integrator.rtol");
  e.options.ode.atol = e.options.ode.rtol * 1e-4;
  return e;
}

NumRunConfig config_num(const Config& c) {
  NumRunConfig n;
  n.d1.B = c.quantity("structure.B");
  n.d1.rabi = {c.quantity("fields.Omega1"), c.quantity("fields.Omega2"), c.quantity("fields.Omegap")};
  n.d1.detuning = {c.quantity("fields.delta1"), c.quantity("fields.delta2"), c.quantity("fields.deltap")};
  n.d1.polarization = {polarization(c, "fields.polarization1"), polarization(c, "fields.polarization2"),
                       polarization(c, "fields.polarizationp")};
  n.d1.map = config_level_map(c);
  n.d1.rwa_cutoff = c.quantity("model.rwa_cutoff");
  n.d1.basis = dipole_basis_from_string(c.text("model.dipole_basis"));
  n.d1.gamma = c.quantity("medium.gamma");
  n.density = c.quantity("medium.density");
  n.projection = projection_from_string(c.text("model.projection"));
  n.dephasing_rate = c.quantity("motion.dephasing");
  n.transit_rate = c.quantity("motion.transit");
  n.evolve.rtol = c.quantity("integrator.rtol");
  n.evolve.atol = n.evolve.rtol * 1e-4;
  return n;
}

MediumParams config_medium(const Config& c) {
  const auto fs = config_fieldset(c);
  MediumParams m;
  m.density = c.quantity("medium.density");
  m.p1 = c.quantity("medium.p1");
  m.p2 = c.quantity("medium.p2");
  m.d41 = std::abs(fs.dip.d41);
  m.d42 = std::abs(fs.dip.d42);
  m.d53 = std::abs(fs.dip.d53);
  m.Op = fs.Op;
  m.gamma = c.quantity("medium.gamma");
  m.Delta = fs.Delta;
  return m;
}

std::vector<double> config_times(const Config& c) {
  const double T = c.quantity("integrator.t_end"), dt = c.quantity("integrator.dt_out");
  if (!(T > 0) || !(dt > 0) || dt > T) throw ConfigError("integrator: need 0 < dt_out <= t_end");
  const long n = std::lround(T / dt);
  std::vector<double> t;
  for (long k = 1; k <= n; ++k) t.push_back(k * dt);
  t.back() = T;
  return t;
}

DensityMatrix config_initial_state(const Config& c, const SchemeHamiltonian& full) {
  const double p1 = c.quantity("medium.p1"), p2 = c.quantity("medium.p2");
  if (p1 < 0 || p2 < 0 || std::abs(p1 + p2 - 1) > 1e-12) throw ConfigError("medium: p1, p2 must be >= 0 and sum to 1");
  std::vector<double> p(full.dimension, 0.0);
  p[full.role.at("1")] = p1;
  p[full.role.at("2")] = p2;
  return DensityMatrix::diagonal(p);
}

double PointResult::get(const std::string& key) const {
  for (const auto& [k, v] : values)
    if (k == key) return v;
  throw std::out_of_range("no result named " + key);
}

PointResult run_point(const Config& c) {
  PointResult r;
  const double B = c.quantity("structure.B");
  const auto map = config_level_map(c);
  const auto preset = c.text("run.preset");
  if (preset != "max-phase") {
    r.values.push_back({"B_G", B});
    r.values.push_back({"delta_mag_MHz", to_mhz(magnetic_mismatch(B, map, config_constants(c)))});
  }
  if (preset == "fig2" || preset == "phase-shift" || preset == "custom") xpm_point(c, r);
  else if (preset == "state-prep") state_prep_point(c, r);
  else if (preset == "max-phase") max_phase_point(c, r);
  else if (preset == "hot-gas") hot_gas_point(c, r);
  else throw ConfigError("run.preset: unknown preset '" + preset + "'");
  return r;
}

std::string to_string(Diagnostic::Level l) {
  switch (l) {
    case Diagnostic::Info: return "info";
    case Diagnostic::Warning: return "warning";
    case Diagnostic::Error: return "error";
  }
  return "?";
}

std::vector<Diagnostic> validate(const Config& c) {
  std::vector<Diagnostic> out;
  auto add = [&](Diagnostic::Level l, std::string m) { out.push_back({l, std::move(m)}); };
  for (const auto& point : expand_sweep(c)) {
    const double B = point.quantity("structure.B");
    if (B < 0) {
      add(Diagnostic::Error, "structure.B must be >= 0");
      continue;
    }
    const double gamma = point.quantity("medium.gamma");
    if (!(gamma > 0)) add(Diagnostic::Error, "medium.gamma must be > 0");
    if (!(point.quantity("medium.density") > 0)) add(Diagnostic::Error, "medium.density must be > 0");
    const double p1 = point.quantity("medium.p1"), p2 = point.quantity("medium.p2");
    const auto det = config_detunings(point);
    std::string tag = "B = " + format_number(B) + " G";
    for (const auto& [key, e] : c.sweep())
      if (key != "structure.B") tag += ", " + key + " = " + point.text(key);
    tag += ": ";
    if (p1 < 0 || p2 < 0 || std::abs(p1 + p2 - 1) > 1e-12) add(Diagnostic::Error, tag + "medium.p1 + medium.p2 must equal 1");
    if (!(std::abs(det.Delta) > 1e-6 * gamma)) add(Diagnostic::Error, tag + "Delta = 0, the Kerr coefficient diverges");
    const double O1 = std::abs(point.quantity("fields.Omega1")), O2 = std::abs(point.quantity("fields.Omega2"));
    const double Op = std::abs(point.quantity("fields.Omegap"));
    if (Op == 0.0) add(Diagnostic::Error, "fields.Omegap is zero, no transparency");
    else {
      const double ratio = std::max(O1, O2) / Op;
      if (ratio >= 0.5)
        add(Diagnostic::Warning, tag + "signal/pump Rabi ratio " + format_number(ratio) + " is not perturbative");
      else if (ratio > 0.1)
        add(Diagnostic::Info, tag + "signal/pump Rabi ratio " + format_number(ratio));
      if (gamma > 0) {
        const double window = transparency_window(Op, gamma);
        const double dm = std::abs(magnetic_mismatch(B, config_level_map(point), config_constants(point)));
        if (dm <= window)
          add(Diagnostic::Warning, tag + "|delta_mag| = " + format_number(to_mhz(dm)) +
                                       " MHz lies inside the transparency window (" + format_number(to_mhz(window)) +
                                       " MHz), leakage to |X> is not suppressed");
        else
          add(Diagnostic::Info, tag + "|delta_mag| / window = " + format_number(dm / window));
      }
    }
    const double cut = point.quantity("model.rwa_cutoff");
    for (auto [name, v] : {std::pair{"Delta", det.Delta}, {"Delta1", det.Delta1}, {"Delta2", det.Delta2}})
      if (std::abs(v) > cut)
        add(Diagnostic::Warning, tag + name + " = " + format_number(to_mhz(v)) +
                                     " MHz exceeds the RWA cutoff, the 16-level model drops that coupling");
  }
  return out;
}

std::vector<Config> expand_sweep(const Config& c) {
  std::vector<Config> points{c};
  const auto& schema = config_schema();
  for (const auto& [key, e] : c.sweep()) {
    const auto values = split(e.value, ',');
    if (values.empty()) throw ConfigError(e.source + ":" + std::to_string(e.line) + ": sweep axis '" + key + "' is empty");
    // carry the unit of the last item onto bare numbers
    std::string unit;
    if (auto sp = values.back().find(' '); sp != std::string::npos) unit = values.back().substr(sp);
    std::vector<Config> next;
    for (const auto& p : points)
      for (const auto& v : values) {
        Config q = p;
        const bool bare = v.find(' ') == std::string::npos && schema.at(key).dim != Dim::Text;
        q.set(key, bare ? v + unit : v, e.source + ":" + std::to_string(e.line));
        next.push_back(std::move(q));
      }
    points = std::move(next);
  }
  return points;
}

RunReport run(const Config& base, const RunOptions& opt) {
  Config c = base;
  if (opt.tol) {
    if (!(*opt.tol > 0)) throw ConfigError("--tol must be > 0");
    c.set("integrator.rtol", format_number(*opt.tol), "--tol");
  }
  for (const auto& d : validate(c))
    if (d.level == Diagnostic::Error) throw PhysicsError("validation: " + d.message);
  auto points = expand_sweep(c);
  // parse everything up front so config errors surface before any work
  for (const auto& p : points) {
    config_times(p);
    config_eat(p);
    config_num(p);
    tiers_of(p);
  }

  std::vector<PointResult> results(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  std::atomic<size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (size_t i; (i = next++) < points.size();) {
      try {
        results[i] = run_point(points[i]);
        if (opt.log) {
          std::lock_guard lock(log_mutex);
          opt.log("point " + std::to_string(i + 1) + "/" + std::to_string(points.size()) + " done");
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::clamp<int>(opt.workers, 1, std::max<int>(1, static_cast<int>(points.size())));
  std::vector<std::thread> pool;
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  // collector
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(opt.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + opt.out_dir + ": " + ec.message());
  RunReport report;
  auto write = [&](const std::string& name, const std::string& text) {
    const auto path = (fs::path(opt.out_dir) / name).string();
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path);
    f << text;
    report.files.push_back(path);
  };
  const std::string head = header(c);
  std::vector<std::string> axes;
  for (const auto& [k, e] : c.sweep()) axes.push_back(k);

  if (!results.front().values.empty()) {
    std::vector<std::string> cols = axes;
    for (const auto& [k, v] : results.front().values) cols.push_back(k);
    std::vector<std::vector<std::string>> rows;
    std::string notes;
    for (size_t i = 0; i < results.size(); ++i) {
      std::vector<std::string> row;
      for (const auto& a : axes) row.push_back(points[i].text(a));
      for (const auto& [k, v] : results[i].values) row.push_back(format_number(v));
      rows.push_back(std::move(row));
      for (const auto& note : results[i].notes) notes += "# note, point " + std::to_string(i + 1) + ": " + note + "\n";
    }
    write("summary.csv", csv_table(head, cols, rows) + notes);
  }
  for (size_t t = 0; t < results.front().tables.size(); ++t) {
    for (size_t i = 0; i < results.size(); ++i) {
      const auto& table = results[i].tables[t];
      std::string ph = head;
      for (const auto& a : axes) ph += "# point " + a + " = " + points[i].text(a) + "\n";
      std::vector<std::vector<std::string>> rows;
      for (const auto& r : table.rows) {
        std::vector<std::string> row;
        for (double v : r) row.push_back(format_number(v));
        rows.push_back(std::move(row));
      }
      const auto name = results.size() == 1 ? table.name + ".csv" : table.name + "_" + std::to_string(i + 1) + ".csv";
      write(name, csv_table(ph, table.columns, rows));
    }
  }
  report.points = std::move(results);
  return report;
}

std::string dump_structure_csv(const std::vector<double>& Bs, const SpectroscopicConstants& k) {
  std::string out = "manifold,F,mF,B,energy_MHz\n";
  for (double B : Bs)
    for (auto m : {Manifold::S12, Manifold::P12})
      for (const auto& l : zeeman_spectrum(m, B, k))
        out += to_string(m) + "," + std::to_string(l.F) + "," + std::to_string(l.mF) + "," + format_number(B) + "," +
               format_number(to_mhz(l.energy)) + "\n";
  return out;
}

std::string estimate_table(const Config& c) {
  std::ostringstream os;
  for (const auto& p : expand_sweep(c)) {
    const auto e = estimate(p);
    char buf[1024];
    std::snprintf(buf, sizeof buf,
                  "lambda/w0            %.6g\n"
                  "gamma/Delta          %.6g\n"
                  "rho k^-3             %.6g\n"
                  "T_min                %.6g us\n"
                  "L = 2 z_R            %.6g mm\n"
                  "E_max                %.6g V/m\n"
                  "phi_max              %.6g rad\n"
                  "transparency window  %.6g MHz\n"
                  "Doppler window       %.6g MHz\n",
                  e.lambda / e.w0, e.gamma / e.Delta, e.rho_k3, e.pipe.T / us(1.0), e.pipe.L / mm(1.0), e.pipe.E_max,
                  e.closed.phi, to_mhz(e.window), to_mhz(e.doppler));
    os << buf;
    for (const auto& w : e.closed.warnings) os << "warning: " << w << "\n";
    os << "\n";
  }
  return os.str();
}

} // namespace deit
