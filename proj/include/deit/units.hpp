#pragma once

#include <complex>
#include <numbers>

namespace deit {

using cplx = std::complex<double>;
inline constexpr cplx I_{0.0, 1.0};

namespace si {
inline constexpr double hbar = 1.054571817e-34;
inline constexpr double c = 299792458.0;
inline constexpr double eps0 = 8.8541878128e-12;
inline constexpr double e = 1.602176634e-19;
inline constexpr double a0 = 5.29177210903e-11;
inline constexpr double ea0 = e * a0;
} // namespace si

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Quoted "MHz" values are ordinary frequencies; everything internal is rad/s.
constexpr double mhz(double v) { return two_pi * 1e6 * v; }
constexpr double to_mhz(double w) { return w / (two_pi * 1e6); }
constexpr double khz(double v) { return two_pi * 1e3 * v; }

constexpr double gauss(double v) { return v; }
constexpr double per_cm3(double v) { return v * 1e6; }
constexpr double mm(double v) { return v * 1e-3; }
constexpr double nm(double v) { return v * 1e-9; }
constexpr double um(double v) { return v * 1e-6; }
constexpr double us(double v) { return v * 1e-6; }

// cm^2/W from m^2/W
constexpr double to_cm2_per_w(double v) { return v * 1e4; }

} // namespace deit
