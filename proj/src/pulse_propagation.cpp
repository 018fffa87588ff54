#include "deit/pulse_propagation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "deit/errors.hpp"

namespace deit {

void check(const PulseSpec& p) {
  if (!(p.w0 > 0 && p.T > 0 && p.lambda > 0 && p.photon_number > 0))
    throw PhysicsError("pulse waist, duration, wavelength and photon number must be > 0");
}

double e_max(const PulseSpec& p) {
  check(p);
  const double pi = std::numbers::pi;
  return std::sqrt(si::hbar * p.omega() / (std::sqrt(2 * pi * pi * pi) * si::eps0 * si::c * p.T * p.w0 * p.w0));
}

cplx gaussian_field(const PulseSpec& p, double tau, double v_gr, double x, double y, double z, double t) {
  const double k = p.k();
  const cplx Theta = p.w0 * p.w0 + I_ * z / k;
  const double Xi2 = p.T * p.T + 4 * k * z * tau;
  if (!(Xi2 > 0)) throw PhysicsError("pulse width parameter Xi^2 = T^2 + 4 k z tau is not positive");
  const double Xi = std::sqrt(Xi2);
  const double delay = v_gr > 0 ? z / v_gr : 0.0;
  const cplx arg = -(x * x + y * y) / (2.0 * Theta) - (delay - t) * (delay - t) / Xi2;
  return std::sqrt(p.photon_number) * e_max(p) * (p.w0 * p.w0 / Theta) * (p.T / Xi) * std::exp(arg);
}

double group_velocity(double eta, double omega) {
  if (eta < 0) throw PhysicsError("group velocity needs eta >= 0");
  return si::c / (1.0 + omega * eta);
}

double transparency_window(double Opp, double gamma) {
  if (Opp < 0 || gamma <= 0) throw PhysicsError("transparency window needs Omega >= 0 and gamma > 0");
  return std::min(Opp, Opp * Opp / gamma);
}

double doppler_window(double Op, double doppler) {
  if (!(doppler > 0)) throw PhysicsError("Doppler width must be > 0");
  return Op * Op / doppler;
}

MinDuration min_pulse_duration(double tau, double k, double zR) {
  if (tau < 0 || k <= 0 || zR <= 0) throw PhysicsError("min_pulse_duration needs positive inputs");
  return {2.0 * std::sqrt(tau * k * zR), 2.0 * zR};
}

MaxPhase max_phase_shift(double lambda, double w0, double gamma, double Delta, double density) {
  if (Delta == 0.0) throw SingularityError("maximum phase diverges at Delta = 0");
  const double k = two_pi / lambda;
  const double rk3 = density / (k * k * k);
  MaxPhase r;
  r.phi = -max_phase_coefficient() * (lambda / w0) * (gamma / Delta) * std::sqrt(rk3);
  r.magnitude = std::abs(r.phi);
  if (std::abs(gamma / Delta) >= 0.5) r.warnings.push_back("gamma/Delta >= 0.5: spontaneous emission not negligible");
  if (lambda / w0 >= 1.0) r.warnings.push_back("lambda/w0 >= 1: beyond the diffraction limit");
  if (rk3 >= 1.0) r.warnings.push_back("rho k^-3 >= 1: dipole-dipole interaction not negligible");
  return r;
}

PhasePipeline max_phase_pipeline(double lambda, double w0, double Delta, double density, double d, double Op,
                                 double p1) {
  if (Delta == 0.0) throw SingularityError("maximum phase diverges at Delta = 0");
  const double k = two_pi / lambda;
  const double omega = k * si::c;
  PhasePipeline r;
  r.gamma = k * k * k * d * d / (3 * std::numbers::pi * si::eps0 * si::hbar);
  const double eta1 = density * p1 * d * d / (2 * si::hbar * si::eps0 * Op * Op);
  const double chi = (d / si::hbar) * (d / si::hbar) / (si::c * si::eps0 * Delta);
  r.tau = eta1 * r.gamma / (2 * Op * Op);
  const double zR = k * w0 * w0;
  const auto md = min_pulse_duration(r.tau, k, zR);
  r.T = md.T;
  r.L = md.L;
  PulseSpec p{w0, r.T, lambda, 1.0};
  r.E_max = e_max(p);
  r.phi = -r.L * omega / si::c * eta1 * chi * si::c * si::eps0 * r.E_max * r.E_max;
  return r;
}

} // namespace deit
