#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "deit/constants.hpp"
#include "deit/units.hpp"

namespace deit {

enum class Manifold { S12, P12 };

std::string to_string(Manifold m);
Manifold manifold_from_string(const std::string& s);

// |mI, mJ> product basis, index = 2*(I - mI) + (1/2 - mJ)
using Composition = Eigen::Matrix<cplx, 8, 1>;
double basis_mI(int index);
double basis_mJ(int index);

struct ZeemanLevel {
  Manifold manifold = Manifold::S12;
  int F = 0;  // zero-field label, carried by adiabatic continuation
  int mF = 0;
  double B = 0.0;      // gauss
  double energy = 0.0; // rad/s relative to the manifold centroid
  Composition composition = Composition::Zero();
};

struct LevelKey {
  Manifold manifold;
  int F;
  int mF;
};

std::string to_string(const LevelKey& k);

// Hyperfine + Zeeman Hamiltonian in the |mI, mJ> basis (rad/s).
Eigen::Matrix<double, 8, 8> breit_rabi_hamiltonian(Manifold m, double B,
                                                   const SpectroscopicConstants& c = rb87_d1());

// Sorted by energy; composition phases follow the Condon-Shortley |J I F mF>
// states at B = 0 and are carried continuously in B.
std::vector<ZeemanLevel> zeeman_spectrum(Manifold m, double B,
                                         const SpectroscopicConstants& c = rb87_d1());

const ZeemanLevel& find_level(const std::vector<ZeemanLevel>& levels, int F, int mF);

// Which Zeeman state plays each role of the double-EIT scheme.
struct LevelMap {
  LevelKey s1{Manifold::S12, 1, 0};
  LevelKey s2{Manifold::S12, 2, 2};
  LevelKey s3{Manifold::S12, 2, 0};
  LevelKey x{Manifold::S12, 2, -2};
  LevelKey s4{Manifold::P12, 2, 1};
  LevelKey s5{Manifold::P12, 2, -1};
  LevelKey s6{Manifold::P12, 1, 1};
  LevelKey s7{Manifold::P12, 1, -1};

  // ordered |1>..|7>, |X>
  std::vector<LevelKey> roles() const { return {s1, s2, s3, s4, s5, s6, s7, x}; }
};

// (E2 - E3) - (E3 - EX): zero when |2>, |3>, |X> are equally spaced.
double magnetic_mismatch(double B, const LevelMap& map = {},
                         const SpectroscopicConstants& c = rb87_d1());

struct DipoleElement {
  ZeemanLevel lower;
  ZeemanLevel upper;
  int q = 0;              // mF_upper - mF_lower for absorption
  double amplitude = 0.0; // C m, <lower| e r_{-q} |upper>
};

DipoleElement dipole_element(const ZeemanLevel& lower, const ZeemanLevel& upper, int q,
                             const SpectroscopicConstants& c = rb87_d1());

// Same element from the coupled-basis 3j/6j contraction; only valid at B = 0.
double zero_field_dipole(int Fg, int mg, int Fe, int me,
                         const SpectroscopicConstants& c = rb87_d1());

struct Branch {
  ZeemanLevel lower;
  double fraction;
};

std::vector<Branch> branching_ratios(const ZeemanLevel& excited,
                                     const SpectroscopicConstants& c = rb87_d1());

} // namespace deit
