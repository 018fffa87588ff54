#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <initializer_list>

#include "deit/atomic_structure.hpp"
#include "deit/errors.hpp"

using namespace deit;

namespace {

const auto& C = rb87_d1();

// closed-form Breit-Rabi energy for J = 1/2
double breit_rabi(Manifold m, int F, int mF, double B) {
  const double A = m == Manifold::S12 ? C.A_ground : C.A_excited;
  const double gJ = m == Manifold::S12 ? C.gJ_ground : C.gJ_excited;
  const double I = 1.5;
  const double hfs = A * (I + 0.5);
  const double x = (gJ - C.gI) * C.muB * B / hfs;
  const double base = -hfs / (2 * (2 * I + 1)) + C.gI * C.muB * mF * B;
  if (std::abs(mF) == 2) {
    // stretched state: linear
    return A * I / 2 + C.muB * B * (gJ * 0.5 + C.gI * I) * (mF > 0 ? 1 : -1);
  }
  const double root = std::sqrt(1 + 4 * mF * x / (2 * I + 1) + x * x);
  return base + (F == 2 ? 1 : -1) * hfs / 2 * root;
}

double zf(double units) { return units * C.reduced_dipole; }

} // namespace

TEST_CASE("shipped constants file matches the compiled table") {
  const auto f = load_constants(std::string(DEIT_DATA_DIR) + "/rb87_d1.txt");
  CHECK(f.A_ground == C.A_ground);
  CHECK(f.A_excited == C.A_excited);
  CHECK(f.gJ_ground == C.gJ_ground);
  CHECK(f.gJ_excited == C.gJ_excited);
  CHECK(f.gI == C.gI);
  CHECK(f.muB == C.muB);
  CHECK(f.gamma == C.gamma);
  CHECK(f.wavelength == C.wavelength);
  CHECK(f.reduced_dipole == C.reduced_dipole);
  CHECK(to_mhz(C.gamma) == doctest::Approx(5.73));
}

TEST_CASE("zero field: hyperfine clusters") {
  const auto g = zeeman_spectrum(Manifold::S12, 0.0);
  REQUIRE(g.size() == 8);
  int n1 = 0, n2 = 0;
  for (const auto& l : g) (l.F == 1 ? n1 : n2)++;
  CHECK(n1 == 3);
  CHECK(n2 == 5);
  CHECK(to_mhz(g.back().energy - g.front().energy) == doctest::Approx(6834.682610904).epsilon(1e-12));
  for (const auto& l : g) CHECK(l.energy == doctest::Approx(l.F == 2 ? 0.75 * C.A_ground : -1.25 * C.A_ground));
}

TEST_CASE("spectrum matches closed-form Breit-Rabi and dense diagonalization") {
  for (auto m : {Manifold::S12, Manifold::P12})
    for (double B : {0.0, 1.0, 75.0, 150.0, 400.0}) {
      const auto lv = zeeman_spectrum(m, B);
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 8, 8>> es(breit_rabi_hamiltonian(m, B));
      for (int k = 0; k < 8; ++k) {
        CHECK(lv[k].energy == doctest::Approx(es.eigenvalues()(k)).epsilon(1e-12).scale(C.A_ground));
        CHECK(lv[k].energy ==
              doctest::Approx(breit_rabi(m, lv[k].F, lv[k].mF, B)).epsilon(1e-12).scale(C.A_ground));
      }
    }
}

TEST_CASE("eigenvectors unitary and mF conserved") {
  for (auto m : {Manifold::S12, Manifold::P12}) {
    const auto lv = zeeman_spectrum(m, 150.0);
    Eigen::Matrix<cplx, 8, 8> U;
    for (int k = 0; k < 8; ++k) U.col(k) = lv[k].composition;
    CHECK((U.adjoint() * U - Eigen::Matrix<cplx, 8, 8>::Identity()).norm() < 1e-12);
    for (const auto& l : lv)
      for (int a = 0; a < 8; ++a)
        if (std::abs(l.composition(a)) > 0) CHECK(basis_mI(a) + basis_mJ(a) == l.mF);
  }
}

TEST_CASE("linear Zeeman slopes of opposite sign") {
  const double B = 1e-3;
  const auto g0 = zeeman_spectrum(Manifold::S12, 0.0);
  const auto g1 = zeeman_spectrum(Manifold::S12, B);
  for (int mF : {-1, 1}) {
    const double s1 = (find_level(g1, 1, mF).energy - find_level(g0, 1, mF).energy) / (C.muB * B * mF);
    const double s2 = (find_level(g1, 2, mF).energy - find_level(g0, 2, mF).energy) / (C.muB * B * mF);
    CHECK(s1 == doctest::Approx(-C.gJ_ground / 4 + 5 * C.gI / 4).epsilon(1e-5));
    CHECK(s2 == doctest::Approx(C.gJ_ground / 4 + 3 * C.gI / 4).epsilon(1e-5));
  }
}

TEST_CASE("energies continuous in B") {
  for (double B = 0.0; B <= 300.0; B += 25.0) {
    const auto a = zeeman_spectrum(Manifold::P12, B);
    const auto b = zeeman_spectrum(Manifold::P12, B + 1e-6);
    for (const auto& l : a)
      CHECK(std::abs(find_level(b, l.F, l.mF).energy - l.energy) < 1e-5 * C.muB * 2);
  }
}

TEST_CASE("magnetic mismatch") {
  CHECK(to_mhz(magnetic_mismatch(150.0)) == doctest::Approx(-12.93).epsilon(0.01));
  CHECK(to_mhz(magnetic_mismatch(150.0)) == doctest::Approx(-12.92861).epsilon(1e-5));
  CHECK(std::abs(magnetic_mismatch(0.0)) < 1e-14 * C.A_ground);
  const double B = 75.0;
  const double oracle = (breit_rabi(Manifold::S12, 2, 2, B) - breit_rabi(Manifold::S12, 2, 0, B)) -
                        (breit_rabi(Manifold::S12, 2, 0, B) - breit_rabi(Manifold::S12, 2, -2, B));
  CHECK(magnetic_mismatch(B) == doctest::Approx(oracle).epsilon(1e-9));
  // |delta| grows with B
  double prev = 0.0;
  for (double b : {50.0, 100.0, 150.0}) {
    const double v = std::abs(magnetic_mismatch(b));
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(zeeman_spectrum(Manifold::S12, -1.0), ConfigError);
  const auto g = zeeman_spectrum(Manifold::S12, 10.0);
  CHECK_THROWS_AS(find_level(g, 1, 2), ConfigError);
  CHECK_THROWS_AS(manifold_from_string("6S1/2"), ConfigError);
  LevelMap bad;
  bad.x = {Manifold::S12, 1, -2};
  CHECK_THROWS_AS(magnetic_mismatch(150.0, bad), ConfigError);
}

TEST_CASE("zero-field dipoles against tabulated CG oracle") {
  // units of <J||er||J'>, derived independently with sympy
  struct Row { int Fg, mg, Fe, me; double v; };
  const Row tab[] = {
      {1, 0, 2, 1, -0.5},                       // d41
      {2, 2, 2, 1, -std::sqrt(6.0) / 6},        // d42
      {2, 0, 2, -1, -0.5},                      // d53
      {2, 0, 2, 1, 0.5},                        // d43
      {1, 0, 1, 1, -std::sqrt(3.0) / 6},        // d61
      {2, 2, 1, 1, std::sqrt(2.0) / 2},         // d62
      {2, 0, 1, 1, std::sqrt(3.0) / 6},         // d63
      {2, 0, 1, -1, std::sqrt(3.0) / 6},        // d73
      {2, -2, 2, -1, std::sqrt(6.0) / 6},       // d5X
  };
  for (const auto& r : tab) CHECK(zero_field_dipole(r.Fg, r.mg, r.Fe, r.me) == doctest::Approx(zf(r.v)).epsilon(1e-13));
  CHECK(std::pow(zero_field_dipole(1, 0, 2, 1) / zero_field_dipole(2, 2, 2, 1), 2) == doctest::Approx(1.5).epsilon(1e-13));
}

TEST_CASE("projected dipoles reduce to the coupled-basis contraction at B = 0") {
  const auto g = zeeman_spectrum(Manifold::S12, 0.0);
  const auto e = zeeman_spectrum(Manifold::P12, 0.0);
  for (const auto& lg : g)
    for (const auto& le : e) {
      const int q = le.mF - lg.mF;
      const double a = std::abs(q) <= 1 ? dipole_element(lg, le, q).amplitude : 0.0;
      CHECK(a == doctest::Approx(zero_field_dipole(lg.F, lg.mF, le.F, le.mF)).epsilon(1e-12).scale(C.reduced_dipole));
    }
}

TEST_CASE("selection rule, exhaustive") {
  const auto g = zeeman_spectrum(Manifold::S12, 150.0);
  const auto e = zeeman_spectrum(Manifold::P12, 150.0);
  int nonzero = 0;
  for (const auto& lg : g)
    for (const auto& le : e)
      for (int q = -1; q <= 1; ++q) {
        const auto d = dipole_element(lg, le, q);
        if (std::abs(d.amplitude) > 1e-15 * C.reduced_dipole) {
          CHECK(le.mF - lg.mF == q);
          ++nonzero;
        }
      }
  CHECK(nonzero > 0);
}

TEST_CASE("sum rule across excited states") {
  for (double B : {0.0, 150.0, 500.0}) {
    const auto g = zeeman_spectrum(Manifold::S12, B);
    const auto e = zeeman_spectrum(Manifold::P12, B);
    for (const auto& le : e) {
      double s = 0.0;
      for (const auto& lg : g)
        for (int q = -1; q <= 1; ++q) s += std::pow(dipole_element(lg, le, q).amplitude, 2);
      CHECK(s == doctest::Approx(C.reduced_dipole * C.reduced_dipole).epsilon(1e-10));
    }
  }
}

TEST_CASE("branching ratios") {
  for (double B : {0.0, 150.0}) {
    const auto e = zeeman_spectrum(Manifold::P12, B);
    for (const auto& le : e) {
      const auto br = branching_ratios(le);
      double s = 0.0;
      for (const auto& b : br) {
        CHECK(b.fraction >= 0.0);
        s += b.fraction;
        const double d = dipole_element(b.lower, le, le.mF - b.lower.mF).amplitude;
        CHECK(b.fraction == doctest::Approx(d * d / (C.reduced_dipole * C.reduced_dipole)).epsilon(1e-10));
      }
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  // |4> at zero field: gamma41/gamma42 = 3/2 from the oracle table
  const auto e0 = zeeman_spectrum(Manifold::P12, 0.0);
  const auto br = branching_ratios(find_level(e0, 2, 1));
  double f1 = 0, f2 = 0;
  for (const auto& b : br) {
    if (b.lower.F == 1 && b.lower.mF == 0) f1 = b.fraction;
    if (b.lower.F == 2 && b.lower.mF == 2) f2 = b.fraction;
  }
  CHECK(f1 == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(f2 == doctest::Approx(1.0 / 6).epsilon(1e-12));
  // 150 G values for |4>, from an independent numpy diagonalization
  const auto e150 = zeeman_spectrum(Manifold::P12, 150.0);
  for (const auto& b : branching_ratios(find_level(e150, 2, 1))) {
    if (b.lower.F == 1 && b.lower.mF == 0) CHECK(b.fraction == doctest::Approx(0.2853).epsilon(5e-4));
    if (b.lower.F == 2 && b.lower.mF == 2) CHECK(b.fraction == doctest::Approx(0.1291).epsilon(5e-4));
  }
}
