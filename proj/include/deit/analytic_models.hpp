#pragma once

#include <array>
#include <optional>
#include <vector>

#include "deit/ode.hpp"
#include "deit/scheme_builder.hpp"

namespace deit {

struct MediumParams {
  double density = 0.0; // m^-3
  double p1 = 0.0, p2 = 0.0;
  double d41 = 0.0, d42 = 0.0, d53 = 0.0; // C m
  cplx Op{0.0};
  double gamma = 0.0;
  double Delta = 0.0;
};

void check(const MediumParams& m);

struct RefractiveResult {
  cplx n1{1.0}, n2{1.0};
  double xpm_coeff = 0.0; // eta1 chi
  double spm_coeff = 0.0; // eta2 chi
};

double eta(int i, const MediumParams& m);
double ac_stark_shift(cplx O2p, double Delta); // J
double kerr_chi(double d53, double Delta);     // (rad/s) per W/m^2
double intensity(cplx E);                      // c eps0 |E|^2

enum class SatBranch {
  Perturbative,     // resonant pump, cross term on field 2
  Phenomenological  // Stark-shifted two-photon detunings, any pump detuning
};

RefractiveResult sat_indices(const MediumParams& m, double d1, double d2, double dp, double I1, double I2,
                             SatBranch branch = SatBranch::Perturbative);

// (|P_on| - |P_off|)/(e a0) for field `which` at two-photon resonance.
double sat_cross_dipole(const MediumParams& m, cplx E1, cplx E2, Field which);

struct EatOptions {
  std::optional<int> order; // nullopt: untruncated
  OdeOptions ode;
};

// Order-resolved amplitudes: column a carries signal order a. One column when untruncated.
using OrderSeries = Eigen::MatrixXcd;

std::vector<OrderSeries> eat_amplitudes(const SchemeHamiltonian& s, int initial, const std::vector<double>& times,
                                        const EatOptions& opt = {});

// p1 (run from |1>) + p2 (run from |2>), truncated at total signal order.
MatrixXc eat_density(const OrderSeries& from1, const OrderSeries& from2, double p1, double p2,
                     std::optional<int> order);

// Tr(rho d) restricted to the transitions driven by `f`; `states` limits it further.
cplx polarization(const MatrixXc& rho, const SchemeHamiltonian& s, Field f,
                  const std::vector<int>* states = nullptr);

cplx refractive_index(cplx P, cplx E, double density);

struct XpmSeries {
  std::vector<double> t;
  std::array<std::vector<cplx>, 2> P_on, P_off; // per signal field
  std::array<cplx, 2> E{};                      // signal amplitudes, V/m
  double density = 0.0;

  double dxpm(int field, size_t k) const;
  std::vector<double> dxpm(int field) const;
};

struct SteadyState {
  double mean = 0.0;
  double drift = 0.0; // relative change between the two halves of the averaging window
  bool converged = false;
};

// Average over the final `fraction` of the series.
SteadyState steady_state(const std::vector<double>& t, const std::vector<double>& y, double fraction = 0.2,
                         double max_drift = 0.01);
cplx steady_mean(const std::vector<double>& t, const std::vector<cplx>& y, double fraction = 0.2);

// first time after which |y - steady| stays within tol*|steady|
double onset_time(const std::vector<double>& t, const std::vector<double>& y, double steady, double tol = 0.05);

struct PhaseResult {
  double phase = 0.0;
  double attenuation = 0.0; // for n_on
};

PhaseResult xpm_phase(cplx n_on, cplx n_off, double L, double omega);
double attenuation(cplx n, double L, double omega);

struct XpmSummary {
  std::array<double, 2> phi{};
  std::array<double, 2> attenuation_on{}, attenuation_off{};
  std::array<double, 2> coeff{};    // m^2/W, phi over (omega/c) L I_partner
  std::array<SteadyState, 2> dxpm{};
};

XpmSummary summarize(const XpmSeries& s, double L, double omega);

struct EatRunConfig {
  FieldSet fields;
  double gamma = 0.0;
  double p1 = 0.4, p2 = 0.6;
  double density = 0.0;
  State5Diagonal s5 = State5Diagonal::Tilde;
  EatOptions options;
};

// on run plus the two partner-off runs on the same time grid
XpmSeries eat_cross_dipole(const EatRunConfig& cfg, const std::vector<double>& times);

struct EtaTilde {
  cplx value;
  cplx linear; // eta1 + i tau delta1
  double tau;
};

EtaTilde eit_eta_with_decay(const MediumParams& m, double d1);

} // namespace deit
