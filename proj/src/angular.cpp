#include "deit/angular.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace deit {
namespace {

int twice(double j) {
  const double t = 2.0 * j;
  const int r = static_cast<int>(std::lround(t));
  if (std::abs(t - r) > 1e-9) throw std::invalid_argument("angular momentum is not a half-integer");
  return r;
}

double lfact(int n) { return std::lgamma(n + 1.0); }

// log of the triangle coefficient, arguments twice-integer
double log_delta(int a, int b, int c) {
  return 0.5 * (lfact((a + b - c) / 2) + lfact((a - b + c) / 2) + lfact((-a + b + c) / 2) -
                lfact((a + b + c) / 2 + 1));
}

bool triangle(int a, int b, int c) {
  return c >= std::abs(a - b) && c <= a + b && (a + b + c) % 2 == 0;
}

double sign(int k) { return (k % 2 == 0) ? 1.0 : -1.0; }

} // namespace

double wigner_3j(double j1_, double j2_, double j3_, double m1_, double m2_, double m3_) {
  const int j1 = twice(j1_), j2 = twice(j2_), j3 = twice(j3_);
  const int m1 = twice(m1_), m2 = twice(m2_), m3 = twice(m3_);
  if (m1 + m2 + m3 != 0) return 0.0;
  if (!triangle(j1, j2, j3)) return 0.0;
  if (std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(m3) > j3) return 0.0;
  if ((j1 + m1) % 2 || (j2 + m2) % 2 || (j3 + m3) % 2) return 0.0;

  const double pre = log_delta(j1, j2, j3) +
                     0.5 * (lfact((j1 + m1) / 2) + lfact((j1 - m1) / 2) + lfact((j2 + m2) / 2) +
                            lfact((j2 - m2) / 2) + lfact((j3 + m3) / 2) + lfact((j3 - m3) / 2));
  const int kmin = std::max({0, (j2 - j3 - m1) / 2, (j1 - j3 + m2) / 2});
  const int kmax = std::min({(j1 + j2 - j3) / 2, (j1 - m1) / 2, (j2 + m2) / 2});
  double sum = 0.0;
  for (int k = kmin; k <= kmax; ++k) {
    const double l = lfact(k) + lfact((j1 + j2 - j3) / 2 - k) + lfact((j1 - m1) / 2 - k) +
                     lfact((j2 + m2) / 2 - k) + lfact((j3 - j2 + m1) / 2 + k) +
                     lfact((j3 - j1 - m2) / 2 + k);
    sum += sign(k) * std::exp(pre - l);
  }
  return sign((j1 - j2 - m3) / 2) * sum;
}

double wigner_6j(double j1_, double j2_, double j3_, double j4_, double j5_, double j6_) {
  const int a = twice(j1_), b = twice(j2_), c = twice(j3_);
  const int d = twice(j4_), e = twice(j5_), f = twice(j6_);
  if (!triangle(a, b, c) || !triangle(a, e, f) || !triangle(d, b, f) || !triangle(d, e, c))
    return 0.0;
  const double pre = log_delta(a, b, c) + log_delta(a, e, f) + log_delta(d, b, f) + log_delta(d, e, c);
  const int t1 = (a + b + c) / 2, t2 = (a + e + f) / 2, t3 = (d + b + f) / 2, t4 = (d + e + c) / 2;
  const int u1 = (a + b + d + e) / 2, u2 = (b + c + e + f) / 2, u3 = (a + c + d + f) / 2;
  const int kmin = std::max({t1, t2, t3, t4});
  const int kmax = std::min({u1, u2, u3});
  double sum = 0.0;
  for (int k = kmin; k <= kmax; ++k) {
    const double l = lfact(k + 1) - lfact(k - t1) - lfact(k - t2) - lfact(k - t3) - lfact(k - t4) -
                     lfact(u1 - k) - lfact(u2 - k) - lfact(u3 - k);
    sum += sign(k) * std::exp(pre + l);
  }
  return sum;
}

double clebsch_gordan(double j1, double m1, double j2, double m2, double J, double M) {
  const int p = twice(j1) - twice(j2) + twice(M);
  return sign(p / 2) * std::sqrt(2.0 * J + 1.0) * wigner_3j(j1, j2, J, m1, m2, -M);
}

} // namespace deit
