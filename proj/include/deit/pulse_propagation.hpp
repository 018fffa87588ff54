#pragma once

#include <string>
#include <vector>

#include "deit/units.hpp"

namespace deit {

struct PulseSpec {
  double w0 = 0.0;     // 1/e intensity waist, m
  double T = 0.0;      // s
  double lambda = 0.0; // m
  double photon_number = 1.0;

  double k() const { return two_pi / lambda; }
  double omega() const { return two_pi * si::c / lambda; }
  double rayleigh() const { return k() * w0 * w0; }
};

void check(const PulseSpec& p);

// Single-photon peak amplitude.
double e_max(const PulseSpec& p);

// Paraxial slowly varying envelope in an EIT medium with delay constant tau;
// scaled by sqrt(photon_number).
cplx gaussian_field(const PulseSpec& p, double tau, double v_gr, double x, double y, double z, double t);

double group_velocity(double eta, double omega);
double transparency_window(double Opp, double gamma);
double doppler_window(double Op, double doppler = mhz(500.0));

struct MinDuration {
  double T;
  double L; // 2 z_R
};
MinDuration min_pulse_duration(double tau, double k, double zR);

inline constexpr double max_phase_coefficient() { return 3.0 * 2.449489742783178 / (4.0 * 3.141592653589793); }

struct MaxPhase {
  double phi = 0.0; // signed, negative for Delta > 0
  double magnitude = 0.0;
  std::vector<std::string> warnings;
};

MaxPhase max_phase_shift(double lambda, double w0, double gamma, double Delta, double density);

// L (omega/c) eta1 chi c eps0 E_max^2 with L = 2 z_R and T from min_pulse_duration,
// for a closed two-level-like transition of dipole d (gamma from d) and population p1.
struct PhasePipeline {
  double phi;
  double gamma;
  double tau;
  double T;
  double L;
  double E_max;
};
PhasePipeline max_phase_pipeline(double lambda, double w0, double Delta, double density, double d, double Op,
                                 double p1 = 1.0);

} // namespace deit
