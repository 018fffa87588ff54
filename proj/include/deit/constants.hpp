#pragma once

#include <string>

namespace deit {

struct SpectroscopicConstants {
  int version = 1;
  double nuclear_spin = 1.5;
  double A_ground = 0.0;  // rad/s
  double A_excited = 0.0; // rad/s
  double gJ_ground = 0.0;
  double gJ_excited = 0.0;
  double gI = 0.0;
  double muB = 0.0;       // rad/s per gauss
  double gamma = 0.0;     // rad/s
  double wavelength = 0.0; // m
  double reduced_dipole = 0.0; // C m, <J=1/2||er||J'=1/2>

  double omega() const;    // optical angular frequency
  double k() const;        // wavenumber
};

// Compiled copy of data/rb87_d1.txt.
const SpectroscopicConstants& rb87_d1();

SpectroscopicConstants load_constants(const std::string& path);

// throws ConfigError on a violated table invariant
void check(const SpectroscopicConstants& c);

} // namespace deit
