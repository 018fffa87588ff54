#pragma once

#include <Eigen/Dense>
#include <array>
#include <map>
#include <string>
#include <vector>

#include "deit/atomic_structure.hpp"
#include "deit/units.hpp"

namespace deit {

using MatrixXc = Eigen::MatrixXcd;

enum class Field { Signal1 = 0, Signal2 = 1, Pump = 2 };
std::string to_string(Field f);

// H(excited, ground) = -dipole * amplitude[field] / hbar
struct Coupling {
  int ground;
  int excited;
  Field field;
  double dipole; // C m
};

struct DecayChannel {
  int from;
  int to;
  double rate; // 1/s
};

struct DephasingChannel {
  int state;
  double rate;
};

struct SchemeHamiltonian {
  int dimension = 0;
  MatrixXc matrix;  // rad/s, hbar = 1
  std::vector<DecayChannel> decay;
  std::vector<DephasingChannel> dephasing;
  // relaxation of the whole state toward transit_target
  double transit_rate = 0.0;
  MatrixXc transit_target;

  std::vector<Coupling> couplings;
  std::array<cplx, 3> amplitude{}; // V/m per field
  std::vector<std::string> labels;
  std::map<std::string, int> role; // "1".."7", "X"
  Eigen::VectorXd frame;           // rotation frequency per state (rad/s)
  std::string frame_note;
};

// Dipoles of the seven-level scheme (C m, signed).
struct EatDipoles {
  double d41 = 0, d42 = 0, d43 = 0, d53 = 0, d61 = 0, d62 = 0, d63 = 0, d73 = 0;
};

enum class DipoleBasis { ZeroFieldCG, ZeemanProjected };
std::string to_string(DipoleBasis b);
DipoleBasis dipole_basis_from_string(const std::string& s);

EatDipoles eat_dipoles(DipoleBasis basis, double B, const LevelMap& map = {},
                       const SpectroscopicConstants& c = rb87_d1());

struct Detunings {
  double d1 = 0, d2 = 0, dp = 0;  // two-photon / laser detunings
  double Delta = 0, Delta1 = 0, Delta2 = 0;
};

// Far detunings implied by the Zeeman structure, for laser detunings d1, d2, dp
// from the |1>,|2>,|3> -> |4> lines.
Detunings detunings_at(double B, double d1 = 0, double d2 = 0, double dp = 0, const LevelMap& map = {},
                       const SpectroscopicConstants& c = rb87_d1());

struct FieldSet {
  cplx O1, O2, Op;                  // primary couplings
  cplx O1p, O2p, O2pp, O2ppp, Opp;  // |6>-|1>, |5>-|3>, |6>-|2>, |7>-|3>, |6>-|3>
  double d1 = 0, d2 = 0, dp = 0;
  double Delta = 0, Delta1 = 0, Delta2 = 0;
  std::array<cplx, 3> amplitude{}; // V/m, zero when built from bare couplings
  EatDipoles dip;                  // zero when built from bare couplings
};

cplx rabi_from_amplitude(cplx E, double d);

// Derived couplings scale the primaries by dipole ratios; `signed_ratios`
// keeps CG signs, otherwise magnitudes (Omega = -|d| E / hbar throughout).
FieldSet make_fieldset(cplx O1, cplx O2, cplx Op, const Detunings& det, const EatDipoles& dip,
                       bool signed_ratios = false);

enum class State5Diagonal { Tilde, Plain }; // -Delta - i gamma/2  or  +Delta - i gamma/2

SchemeHamiltonian build_eat_hamiltonian(const FieldSet& fs, double gamma,
                                        State5Diagonal s5 = State5Diagonal::Tilde);

struct FiveLevelDecay {
  double b41 = 0.0, b42 = 0.0, b43 = 0.0; // fractions of gamma out of |4>
  double b53 = 0.0;                       // the rest of |5> leaves the scheme
};

SchemeHamiltonian build_five_level(const FieldSet& fs, double gamma, const FiveLevelDecay& decay);

struct D1Config {
  double B = 150.0;                          // gauss
  std::array<cplx, 3> rabi{};                // primary couplings on |1>,|2>,|3> -> |4>
  std::array<double, 3> detuning{0, 0, 0};   // laser minus primary transition
  std::array<int, 3> polarization{+1, -1, +1}; // mF_e - mF_g
  LevelMap map;
  double rwa_cutoff = mhz(2000.0);
  DipoleBasis basis = DipoleBasis::ZeroFieldCG;
  double gamma = rb87_d1().gamma;
  double optical_offset = 0.0; // common shift of excited energies and lasers
};

SchemeHamiltonian build_full_d1(const D1Config& cfg, const SpectroscopicConstants& c = rb87_d1());

// Sub-block on the given states, couplings and channels kept when both ends survive.
SchemeHamiltonian restrict(const SchemeHamiltonian& s, const std::vector<int>& keep);

} // namespace deit
