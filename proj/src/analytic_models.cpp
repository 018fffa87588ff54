#include "deit/analytic_models.hpp"

#include <cmath>

#include "deit/errors.hpp"

namespace deit {

void check(const MediumParams& m) {
  if (!(m.density > 0)) throw PhysicsError("invalid medium: density must be > 0");
  if (m.p1 < 0 || m.p2 < 0 || m.p1 + m.p2 > 1.0 + 1e-12)
    throw PhysicsError("invalid medium: populations must be >= 0 with p1 + p2 <= 1");
}

double eta(int i, const MediumParams& m) {
  if (i != 1 && i != 2) throw PhysicsError("eta index must be 1 or 2");
  const double op2 = std::norm(m.Op);
  if (op2 == 0.0) throw PhysicsError("invalid medium: pump Rabi frequency is zero");
  const double p = i == 1 ? m.p1 : m.p2;
  const double d = i == 1 ? m.d41 : m.d42;
  return m.density * p * d * d / (2 * si::hbar * si::eps0 * op2);
}

double ac_stark_shift(cplx O2p, double Delta) {
  if (Delta == 0.0) throw SingularityError("AC Stark shift diverges at Delta = 0");
  return si::hbar * std::norm(O2p) / Delta;
}

double kerr_chi(double d53, double Delta) {
  if (Delta == 0.0) throw SingularityError("Kerr coefficient diverges at Delta = 0");
  const double r = d53 / si::hbar;
  return r * r / (si::c * si::eps0 * Delta);
}

double intensity(cplx E) { return si::c * si::eps0 * std::norm(E); }

RefractiveResult sat_indices(const MediumParams& m, double d1, double d2, double dp, double I1, double I2,
                             SatBranch branch) {
  check(m);
  const double e1 = eta(1, m), e2 = eta(2, m);
  const double chi = kerr_chi(m.d53, m.Delta);
  RefractiveResult r;
  r.xpm_coeff = e1 * chi;
  r.spm_coeff = e2 * chi;
  if (branch == SatBranch::Perturbative) {
    if (dp != 0.0) throw PhysicsError("perturbative SAT branch assumes a resonant pump (dp = 0)");
    r.n1 = 1.0 + e1 * (d1 - chi * I2);
    r.n2 = 1.0 + e2 * (d2 - chi * I2) - e1 * chi * I1;
  } else {
    r.n1 = 1.0 + e1 * (d1 - dp - chi * I2);
    r.n2 = 1.0 + e2 * (d2 - dp - chi * I2);
  }
  return r;
}

double sat_cross_dipole(const MediumParams& m, cplx E1, cplx E2, Field which) {
  const double I1 = intensity(E1), I2 = intensity(E2);
  const bool one = which == Field::Signal1;
  if (!one && which != Field::Signal2) throw PhysicsError("cross dipole is defined for the signal fields");
  const auto on = sat_indices(m, 0, 0, 0, I1, I2);
  const auto off = one ? sat_indices(m, 0, 0, 0, I1, 0.0) : sat_indices(m, 0, 0, 0, 0.0, I2);
  const cplx E = one ? E1 : E2;
  auto P = [&](cplx n) { return 2 * si::eps0 * E * (n - 1.0) / m.density; };
  const cplx pon = P(one ? on.n1 : on.n2), poff = P(one ? off.n1 : off.n2);
  return (std::abs(pon) - std::abs(poff)) / si::ea0;
}

std::vector<OrderSeries> eat_amplitudes(const SchemeHamiltonian& s, int initial, const std::vector<double>& times,
                                        const EatOptions& opt) {
  const int n = s.dimension;
  if (initial < 0 || initial >= n) throw PhysicsError("initial state out of range");
  MatrixXc V = MatrixXc::Zero(n, n);
  for (const auto& c : s.couplings)
    if (c.field != Field::Pump) {
      V(c.excited, c.ground) = s.matrix(c.excited, c.ground);
      V(c.ground, c.excited) = s.matrix(c.ground, c.excited);
    }
  const bool tagged = opt.order.has_value();
  if (tagged && *opt.order < 0) throw PhysicsError("truncation order must be >= 0");
  const int cols = tagged ? *opt.order + 1 : 1;
  const MatrixXc H0 = tagged ? MatrixXc(s.matrix - V) : s.matrix;
  const MatrixXc mH0 = -I_ * H0, mV = -I_ * V;

  OrderSeries y = OrderSeries::Zero(n, cols);
  y(initial, 0) = 1.0;
  auto rhs = [&](double, const OrderSeries& a, OrderSeries& d) {
    d.noalias() = mH0 * a;
    if (cols > 1) d.rightCols(cols - 1).noalias() += mV * a.leftCols(cols - 1);
  };
  std::vector<OrderSeries> out;
  out.reserve(times.size());
  integrate_dopri5(rhs, y, 0.0, times, [&](double, const OrderSeries& a) { out.push_back(a); }, opt.ode);
  return out;
}

MatrixXc eat_density(const OrderSeries& a, const OrderSeries& b, double p1, double p2, std::optional<int> order) {
  const int n = static_cast<int>(a.rows());
  MatrixXc rho = MatrixXc::Zero(n, n);
  auto add = [&](const OrderSeries& s, double p) {
    if (p == 0.0) return;
    const int N = static_cast<int>(s.cols()) - 1;
    const int lim = order ? *order : 2 * N;
    for (int x = 0; x <= N; ++x)
      for (int y = 0; y <= N && x + y <= lim; ++y) rho.noalias() += p * s.col(x) * s.col(y).adjoint();
  };
  add(a, p1);
  add(b, p2);
  return rho;
}

cplx polarization(const MatrixXc& rho, const SchemeHamiltonian& s, Field f, const std::vector<int>* states) {
  auto inside = [&](int k) {
    if (!states) return true;
    for (int v : *states)
      if (v == k) return true;
    return false;
  };
  cplx P = 0.0;
  for (const auto& c : s.couplings)
    if (c.field == f && inside(c.ground) && inside(c.excited)) P += rho(c.excited, c.ground) * c.dipole;
  return P;
}

cplx refractive_index(cplx P, cplx E, double density) {
  if (E == 0.0) throw PhysicsError("refractive index needs a nonzero field amplitude");
  return 1.0 + density * P / (2 * si::eps0 * E);
}

double XpmSeries::dxpm(int field, size_t k) const {
  return (std::abs(P_on[field][k]) - std::abs(P_off[field][k])) / si::ea0;
}

std::vector<double> XpmSeries::dxpm(int field) const {
  std::vector<double> v(t.size());
  for (size_t k = 0; k < t.size(); ++k) v[k] = dxpm(field, k);
  return v;
}

namespace {

std::pair<size_t, size_t> window(const std::vector<double>& t, double fraction) {
  if (t.empty()) throw PhysicsError("empty time series");
  const double t0 = t.back() - fraction * (t.back() - t.front());
  size_t i = 0;
  while (i < t.size() && t[i] < t0 - 1e-15 * std::abs(t0)) ++i;
  return {std::min(i, t.size() - 1), t.size()};
}

} // namespace

SteadyState steady_state(const std::vector<double>& t, const std::vector<double>& y, double fraction,
                         double max_drift) {
  const auto [a, b] = window(t, fraction);
  SteadyState s;
  double sum = 0.0;
  for (size_t k = a; k < b; ++k) sum += y[k];
  s.mean = sum / static_cast<double>(b - a);
  const size_t mid = a + (b - a) / 2;
  if (mid > a && b > mid) {
    double h1 = 0.0, h2 = 0.0;
    for (size_t k = a; k < mid; ++k) h1 += y[k];
    for (size_t k = mid; k < b; ++k) h2 += y[k];
    h1 /= static_cast<double>(mid - a);
    h2 /= static_cast<double>(b - mid);
    s.drift = s.mean != 0.0 ? std::abs(h2 - h1) / std::abs(s.mean) : 0.0;
  }
  s.converged = s.drift < max_drift;
  return s;
}

cplx steady_mean(const std::vector<double>& t, const std::vector<cplx>& y, double fraction) {
  const auto [a, b] = window(t, fraction);
  cplx sum = 0.0;
  for (size_t k = a; k < b; ++k) sum += y[k];
  return sum / static_cast<double>(b - a);
}

double onset_time(const std::vector<double>& t, const std::vector<double>& y, double steady, double tol) {
  for (size_t k = y.size(); k-- > 0;)
    if (std::abs(y[k] - steady) > tol * std::abs(steady)) return k + 1 < t.size() ? t[k + 1] : t.back();
  return t.front();
}

double attenuation(cplx n, double L, double omega) { return 1.0 - std::exp(-2.0 * omega / si::c * L * n.imag()); }

PhaseResult xpm_phase(cplx n_on, cplx n_off, double L, double omega) {
  if (!(L > 0)) throw PhysicsError("medium length must be > 0");
  return {omega / si::c * L * (n_on - n_off).real(), attenuation(n_on, L, omega)};
}

XpmSummary summarize(const XpmSeries& s, double L, double omega) {
  XpmSummary r;
  for (int f = 0; f < 2; ++f) {
    const cplx non = refractive_index(steady_mean(s.t, s.P_on[f]), s.E[f], s.density);
    const cplx noff = refractive_index(steady_mean(s.t, s.P_off[f]), s.E[f], s.density);
    const auto ph = xpm_phase(non, noff, L, omega);
    r.phi[f] = ph.phase;
    r.attenuation_on[f] = ph.attenuation;
    r.attenuation_off[f] = attenuation(noff, L, omega);
    r.coeff[f] = ph.phase / (omega / si::c * L * intensity(s.E[1 - f]));
    r.dxpm[f] = steady_state(s.t, s.dxpm(f));
  }
  return r;
}

namespace {

FieldSet switch_off(FieldSet f, Field which) {
  if (which == Field::Signal1) f.O1 = f.O1p = 0.0;
  if (which == Field::Signal2) f.O2 = f.O2p = f.O2pp = f.O2ppp = 0.0;
  return f;
}

} // namespace

XpmSeries eat_cross_dipole(const EatRunConfig& cfg, const std::vector<double>& times) {
  XpmSeries out;
  out.t = times;
  out.E = {cfg.fields.amplitude[0], cfg.fields.amplitude[1]};
  out.density = cfg.density;
  auto run = [&](const FieldSet& fs, int field, std::vector<cplx>& dst) {
    const auto s = build_eat_hamiltonian(fs, cfg.gamma, cfg.s5);
    const auto a = eat_amplitudes(s, 0, times, cfg.options);
    const auto b = eat_amplitudes(s, 1, times, cfg.options);
    dst.resize(times.size());
    for (size_t k = 0; k < times.size(); ++k)
      dst[k] = polarization(eat_density(a[k], b[k], cfg.p1, cfg.p2, cfg.options.order), s, Field(field));
  };
  const auto on = build_eat_hamiltonian(cfg.fields, cfg.gamma, cfg.s5);
  {
    const auto a = eat_amplitudes(on, 0, times, cfg.options);
    const auto b = eat_amplitudes(on, 1, times, cfg.options);
    out.P_on[0].resize(times.size());
    out.P_on[1].resize(times.size());
    for (size_t k = 0; k < times.size(); ++k) {
      const MatrixXc rho = eat_density(a[k], b[k], cfg.p1, cfg.p2, cfg.options.order);
      out.P_on[0][k] = polarization(rho, on, Field::Signal1);
      out.P_on[1][k] = polarization(rho, on, Field::Signal2);
    }
  }
  run(switch_off(cfg.fields, Field::Signal2), 0, out.P_off[0]);
  run(switch_off(cfg.fields, Field::Signal1), 1, out.P_off[1]);
  return out;
}

EtaTilde eit_eta_with_decay(const MediumParams& m, double d1) {
  const double e1 = eta(1, m);
  const double op2 = std::norm(m.Op);
  const cplx den = op2 - d1 * (d1 + I_ * m.gamma / 2.0);
  if (std::abs(den) <= 1e-14 * op2) throw SingularityError("dressed-state pole in the EIT susceptibility");
  EtaTilde r;
  r.value = e1 * op2 / den;
  r.tau = e1 * m.gamma / (2 * op2);
  r.linear = e1 + I_ * r.tau * d1;
  return r;
}

} // namespace deit
