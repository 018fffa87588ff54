#include "deit/scheme_builder.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "deit/errors.hpp"

namespace deit {

std::string to_string(Field f) {
  switch (f) {
    case Field::Signal1: return "1";
    case Field::Signal2: return "2";
    case Field::Pump: return "p";
  }
  return "?";
}

std::string to_string(DipoleBasis b) {
  return b == DipoleBasis::ZeroFieldCG ? "zero_field_cg" : "zeeman_projected";
}

DipoleBasis dipole_basis_from_string(const std::string& s) {
  if (s == "zero_field_cg") return DipoleBasis::ZeroFieldCG;
  if (s == "zeeman_projected") return DipoleBasis::ZeemanProjected;
  throw ConfigError("unknown dipole basis '" + s + "' (zero_field_cg | zeeman_projected)");
}

namespace {

double pair_dipole(DipoleBasis basis, const ZeemanLevel& g, const ZeemanLevel& e,
                   const SpectroscopicConstants& c) {
  if (std::abs(e.mF - g.mF) > 1) return 0.0;
  if (basis == DipoleBasis::ZeroFieldCG) return zero_field_dipole(g.F, g.mF, e.F, e.mF, c);
  return dipole_element(g, e, e.mF - g.mF, c).amplitude;
}

struct Spectra {
  std::vector<ZeemanLevel> g, e;
  const ZeemanLevel& at(const LevelKey& k) const {
    return find_level(k.manifold == Manifold::S12 ? g : e, k.F, k.mF);
  }
};

Spectra spectra(double B, const SpectroscopicConstants& c) {
  return {zeeman_spectrum(Manifold::S12, B, c), zeeman_spectrum(Manifold::P12, B, c)};
}

} // namespace

EatDipoles eat_dipoles(DipoleBasis basis, double B, const LevelMap& m, const SpectroscopicConstants& c) {
  const auto s = spectra(B, c);
  auto d = [&](const LevelKey& e, const LevelKey& g) { return pair_dipole(basis, s.at(g), s.at(e), c); };
  EatDipoles r;
  r.d41 = d(m.s4, m.s1);
  r.d42 = d(m.s4, m.s2);
  r.d43 = d(m.s4, m.s3);
  r.d53 = d(m.s5, m.s3);
  r.d61 = d(m.s6, m.s1);
  r.d62 = d(m.s6, m.s2);
  r.d63 = d(m.s6, m.s3);
  r.d73 = d(m.s7, m.s3);
  return r;
}

Detunings detunings_at(double B, double d1, double d2, double dp, const LevelMap& m,
                       const SpectroscopicConstants& c) {
  const auto s = spectra(B, c);
  const double E2 = s.at(m.s2).energy, E3 = s.at(m.s3).energy;
  const double E4 = s.at(m.s4).energy, E5 = s.at(m.s5).energy;
  const double E6 = s.at(m.s6).energy, E7 = s.at(m.s7).energy;
  const double w2 = E4 - E2 + d2, wp = E4 - E3 + dp;
  Detunings r;
  r.d1 = d1;
  r.d2 = d2;
  r.dp = dp;
  // frame offsets of |5>, |6>, |7> relative to |4>
  r.Delta = w2 - wp - (E5 - E4);
  r.Delta1 = E4 - E6;
  r.Delta2 = w2 - wp - (E7 - E4);
  return r;
}

cplx rabi_from_amplitude(cplx E, double d) { return -std::abs(d) * E / si::hbar; }

FieldSet make_fieldset(cplx O1, cplx O2, cplx Op, const Detunings& det, const EatDipoles& dip,
                       bool signed_ratios) {
  if (dip.d41 == 0 || dip.d42 == 0 || dip.d43 == 0) throw PhysicsError("primary dipole vanishes");
  auto r = [&](double a, double b) { return signed_ratios ? a / b : std::abs(a / b); };
  FieldSet f;
  f.O1 = O1;
  f.O2 = O2;
  f.Op = Op;
  f.O1p = O1 * r(dip.d61, dip.d41);
  f.O2p = O2 * r(dip.d53, dip.d42);
  f.O2pp = O2 * r(dip.d62, dip.d42);
  f.O2ppp = O2 * r(dip.d73, dip.d42);
  f.Opp = Op * r(dip.d63, dip.d43);
  f.d1 = det.d1;
  f.d2 = det.d2;
  f.dp = det.dp;
  f.Delta = det.Delta;
  f.Delta1 = det.Delta1;
  f.Delta2 = det.Delta2;
  // Omega = -|d| E / hbar on the primary lines
  f.amplitude = {-si::hbar * O1 / std::abs(dip.d41), -si::hbar * O2 / std::abs(dip.d42),
                 -si::hbar * Op / std::abs(dip.d43)};
  if (signed_ratios) {
    f.dip = dip;
    // keep H_main = Omega with a signed dipole: E = -hbar Omega / d
    f.amplitude = {-si::hbar * O1 / dip.d41, -si::hbar * O2 / dip.d42, -si::hbar * Op / dip.d43};
  } else {
    f.dip = {std::abs(dip.d41), std::abs(dip.d42), std::abs(dip.d43), std::abs(dip.d53),
             std::abs(dip.d61), std::abs(dip.d62), std::abs(dip.d63), std::abs(dip.d73)};
  }
  return f;
}

namespace {

void set_coupling(SchemeHamiltonian& s, int g, int e, Field fld, cplx om, double d) {
  s.matrix(e, g) += om;
  s.matrix(g, e) += std::conj(om);
  s.couplings.push_back({g, e, fld, d});
}

} // namespace

SchemeHamiltonian build_eat_hamiltonian(const FieldSet& f, double gamma, State5Diagonal s5) {
  SchemeHamiltonian s;
  s.dimension = 7;
  s.matrix = MatrixXc::Zero(7, 7);
  const cplx ig2 = I_ * gamma / 2.0;
  s.matrix(0, 0) = f.d1;
  s.matrix(1, 1) = f.d2;
  s.matrix(2, 2) = f.dp;
  s.matrix(3, 3) = -ig2;
  s.matrix(4, 4) = s5 == State5Diagonal::Tilde ? -f.Delta - ig2 : f.Delta - ig2;
  s.matrix(5, 5) = -f.Delta1 - ig2;
  s.matrix(6, 6) = -f.Delta2 - ig2;
  const auto& d = f.dip;
  set_coupling(s, 0, 3, Field::Signal1, f.O1, d.d41);
  set_coupling(s, 1, 3, Field::Signal2, f.O2, d.d42);
  set_coupling(s, 2, 3, Field::Pump, f.Op, d.d43);
  set_coupling(s, 2, 4, Field::Signal2, f.O2p, d.d53);
  set_coupling(s, 0, 5, Field::Signal1, f.O1p, d.d61);
  set_coupling(s, 1, 5, Field::Signal2, f.O2pp, d.d62);
  set_coupling(s, 2, 5, Field::Pump, f.Opp, d.d63);
  set_coupling(s, 2, 6, Field::Signal2, f.O2ppp, d.d73);
  s.amplitude = f.amplitude;
  s.labels = {"1", "2", "3", "4", "5", "6", "7"};
  for (int k = 0; k < 7; ++k) s.role[s.labels[k]] = k;
  s.frame = Eigen::VectorXd::Zero(7);
  s.frame_note = "seven-level frame, |4> at zero, decay as -i gamma/2 on excited diagonals";
  return s;
}

SchemeHamiltonian build_five_level(const FieldSet& f, double gamma, const FiveLevelDecay& b) {
  for (double x : {b.b41, b.b42, b.b43, b.b53})
    if (x < 0) throw ConfigError("branching fractions must be >= 0");
  const double s4 = b.b41 + b.b42 + b.b43;
  if (s4 > 1.0 + 1e-12 || b.b53 > 1.0 + 1e-12) throw ConfigError("branching fractions exceed 1");
  SchemeHamiltonian s;
  s.dimension = 5;
  s.matrix = MatrixXc::Zero(5, 5);
  s.matrix(0, 0) = f.d1;
  s.matrix(1, 1) = f.d2;
  s.matrix(2, 2) = f.dp;
  s.matrix(4, 4) = -f.Delta;
  // whatever does not return to the scheme is lost
  s.matrix(3, 3) -= I_ * gamma * (1.0 - s4) / 2.0;
  s.matrix(4, 4) -= I_ * gamma * (1.0 - b.b53) / 2.0;
  const auto& d = f.dip;
  set_coupling(s, 0, 3, Field::Signal1, f.O1, d.d41);
  set_coupling(s, 1, 3, Field::Signal2, f.O2, d.d42);
  set_coupling(s, 2, 3, Field::Pump, f.Op, d.d43);
  set_coupling(s, 2, 4, Field::Signal2, f.O2p, d.d53);
  if (b.b41 > 0) s.decay.push_back({3, 0, gamma * b.b41});
  if (b.b42 > 0) s.decay.push_back({3, 1, gamma * b.b42});
  if (b.b43 > 0) s.decay.push_back({3, 2, gamma * b.b43});
  if (b.b53 > 0) s.decay.push_back({4, 2, gamma * b.b53});
  s.amplitude = f.amplitude;
  s.labels = {"1", "2", "3", "4", "5"};
  for (int k = 0; k < 5; ++k) s.role[s.labels[k]] = k;
  s.frame = Eigen::VectorXd::Zero(5);
  s.frame_note = "five-level frame, |4> at zero";
  return s;
}

SchemeHamiltonian build_full_d1(const D1Config& cfg, const SpectroscopicConstants& c) {
  if (!(cfg.B >= 0)) throw ConfigError("B must be >= 0");
  auto sp = spectra(cfg.B, c);
  // F ascending, then mF ascending
  auto order = [](std::vector<ZeemanLevel>& v) {
    std::sort(v.begin(), v.end(), [](const ZeemanLevel& a, const ZeemanLevel& b) {
      return std::make_pair(a.F, a.mF) < std::make_pair(b.F, b.mF);
    });
  };
  order(sp.g);
  order(sp.e);
  std::vector<ZeemanLevel> lv = sp.g;
  lv.insert(lv.end(), sp.e.begin(), sp.e.end());
  const int n = 16;
  Eigen::VectorXd en(n);
  for (int k = 0; k < n; ++k) en(k) = lv[k].energy + (k >= 8 ? cfg.optical_offset : 0.0);

  SchemeHamiltonian s;
  s.dimension = n;
  for (const auto& l : lv) {
    std::ostringstream os;
    os << (l.manifold == Manifold::S12 ? "g(" : "e(") << l.F << (l.manifold == Manifold::P12 ? "'" : "")
       << "," << l.mF << ")";
    s.labels.push_back(os.str());
  }
  auto index_of = [&](const LevelKey& k) {
    for (int i = 0; i < n; ++i)
      if (lv[i].manifold == k.manifold && lv[i].F == k.F && lv[i].mF == k.mF) return i;
    throw ConfigError("level map names a missing state " + to_string(k));
  };
  const char* names[] = {"1", "2", "3", "4", "5", "6", "7", "X"};
  const auto roles = cfg.map.roles();
  for (size_t r = 0; r < roles.size(); ++r) s.role[names[r]] = index_of(roles[r]);
  const int i4 = s.role["4"];
  const int main_g[3] = {s.role["1"], s.role["2"], s.role["3"]};

  std::array<double, 3> w{};
  for (int f = 0; f < 3; ++f) {
    const int g = main_g[f];
    if (lv[i4].mF - lv[g].mF != cfg.polarization[f])
      throw ConfigError("polarization of field " + to_string(Field(f)) + " does not drive " + s.labels[g] +
                        " -> " + s.labels[i4]);
    w[f] = en(i4) - en(g) + cfg.detuning[f];
  }

  struct Raw { int g, e, f; double d; };
  std::vector<Raw> raw;
  int dropped = 0;
  for (int f = 0; f < 3; ++f)
    for (int g = 0; g < 8; ++g)
      for (int e = 8; e < n; ++e) {
        if (lv[e].mF - lv[g].mF != cfg.polarization[f]) continue;
        const double d = pair_dipole(cfg.basis, lv[g], lv[e], c);
        if (d == 0.0) continue;
        if (std::abs(w[f] - (en(e) - en(g))) > cfg.rwa_cutoff) {
          ++dropped;
          continue;
        }
        for (const auto& o : raw)
          if (o.g == g && o.e == e)
            throw PhysicsError("two lasers drive " + s.labels[g] + " -> " + s.labels[e] +
                               " inside the RWA cutoff; no time-independent frame");
        raw.push_back({g, e, f, d});
      }

  // frame: theta_e - theta_g = w_laser on every kept coupling; |4> sits at zero,
  // components not connected to |4> are anchored on their first state
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd th = Eigen::VectorXd::Constant(n, nan);
  std::vector<int> seeds{i4};
  for (int k = 0; k < n; ++k) seeds.push_back(k);
  for (int seed : seeds) {
    if (!std::isnan(th(seed))) continue;
    th(seed) = en(seed);
    std::deque<int> q{seed};
    while (!q.empty()) {
      const int u = q.front();
      q.pop_front();
      for (const auto& r : raw) {
        int v = -1;
        double tv = 0;
        if (r.g == u) { v = r.e; tv = th(u) + w[r.f]; }
        else if (r.e == u) { v = r.g; tv = th(u) - w[r.f]; }
        else continue;
        if (std::isnan(th(v))) {
          th(v) = tv;
          q.push_back(v);
        } else if (std::abs(th(v) - tv) > 1e-6 * std::max(1.0, std::abs(tv))) {
          throw PhysicsError("inconsistent rotating frame around " + s.labels[v]);
        }
      }
    }
  }

  s.matrix = MatrixXc::Zero(n, n);
  for (int k = 0; k < n; ++k) s.matrix(k, k) = en(k) - th(k);
  std::array<cplx, 3> E{};
  for (int f = 0; f < 3; ++f) {
    const double dm = pair_dipole(cfg.basis, lv[main_g[f]], lv[i4], c);
    E[f] = -si::hbar * cfg.rabi[f] / dm;
  }
  for (const auto& r : raw) set_coupling(s, r.g, r.e, Field(r.f), -r.d * E[r.f] / si::hbar, r.d);
  s.amplitude = E;

  const double d2 = c.reduced_dipole * c.reduced_dipole;
  for (int e = 8; e < n; ++e)
    for (int g = 0; g < 8; ++g) {
      const double d = pair_dipole(cfg.basis, lv[g], lv[e], c);
      if (d != 0.0) s.decay.push_back({e, g, cfg.gamma * d * d / d2});
    }
  s.frame = th;
  std::ostringstream note;
  note << "multi-frequency frame: theta_e - theta_g = omega_laser on " << raw.size()
       << " couplings, |4> at zero, RWA cutoff " << to_mhz(cfg.rwa_cutoff) << " MHz, " << dropped
       << " couplings dropped, dipoles " << to_string(cfg.basis);
  s.frame_note = note.str();
  return s;
}

SchemeHamiltonian restrict(const SchemeHamiltonian& s, const std::vector<int>& keep) {
  std::vector<int> pos(s.dimension, -1);
  for (size_t k = 0; k < keep.size(); ++k) pos[keep[k]] = static_cast<int>(k);
  SchemeHamiltonian r;
  r.dimension = static_cast<int>(keep.size());
  r.matrix = MatrixXc(r.dimension, r.dimension);
  for (int a = 0; a < r.dimension; ++a)
    for (int b = 0; b < r.dimension; ++b) r.matrix(a, b) = s.matrix(keep[a], keep[b]);
  for (const auto& c : s.couplings)
    if (pos[c.ground] >= 0 && pos[c.excited] >= 0) r.couplings.push_back({pos[c.ground], pos[c.excited], c.field, c.dipole});
  for (const auto& d : s.decay)
    if (pos[d.from] >= 0 && pos[d.to] >= 0) r.decay.push_back({pos[d.from], pos[d.to], d.rate});
  for (const auto& d : s.dephasing)
    if (pos[d.state] >= 0) r.dephasing.push_back({pos[d.state], d.rate});
  r.transit_rate = s.transit_rate;
  if (s.transit_target.size()) {
    r.transit_target = MatrixXc(r.dimension, r.dimension);
    for (int a = 0; a < r.dimension; ++a)
      for (int b = 0; b < r.dimension; ++b) r.transit_target(a, b) = s.transit_target(keep[a], keep[b]);
  }
  r.amplitude = s.amplitude;
  for (int k : keep) r.labels.push_back(s.labels[k]);
  for (const auto& [name, idx] : s.role)
    if (pos[idx] >= 0) r.role[name] = pos[idx];
  r.frame = Eigen::VectorXd(r.dimension);
  for (int a = 0; a < r.dimension; ++a) r.frame(a) = s.frame.size() ? s.frame(keep[a]) : 0.0;
  r.frame_note = s.frame_note + " (restricted)";
  return r;
}

} // namespace deit
