#pragma once

// Wigner symbols with Condon-Shortley phases. Angular momenta are passed as
// doubles (half-integers allowed) and converted to twice-integers internally.

namespace deit {

double wigner_3j(double j1, double j2, double j3, double m1, double m2, double m3);
double wigner_6j(double j1, double j2, double j3, double j4, double j5, double j6);

// <j1 m1; j2 m2 | J M>
double clebsch_gordan(double j1, double m1, double j2, double m2, double J, double M);

} // namespace deit
