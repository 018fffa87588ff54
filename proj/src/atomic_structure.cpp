#include "deit/atomic_structure.hpp"

#include <algorithm>
#include <cmath>

#include "deit/angular.hpp"
#include "deit/errors.hpp"

namespace deit {
namespace {

constexpr double J = 0.5;

double A_of(Manifold m, const SpectroscopicConstants& c) {
  return m == Manifold::S12 ? c.A_ground : c.A_excited;
}
double gJ_of(Manifold m, const SpectroscopicConstants& c) {
  return m == Manifold::S12 ? c.gJ_ground : c.gJ_excited;
}

int mF_of(int i) { return static_cast<int>(std::lround(basis_mI(i) + basis_mJ(i))); }

std::vector<int> block(int mF) {
  std::vector<int> idx;
  for (int i = 0; i < 8; ++i)
    if (mF_of(i) == mF) idx.push_back(i);
  return idx;
}

int label_F(double e, double A, double I) {
  // A/2 [F(F+1) - I(I+1) - J(J+1)]
  const double ff = 2.0 * e / A + I * (I + 1) + J * (J + 1);
  return static_cast<int>(std::lround(0.5 * (-1.0 + std::sqrt(1.0 + 4.0 * ff))));
}

struct BlockState {
  int F;
  Eigen::VectorXd v;
  double e;
};

std::vector<BlockState> diag_block(const Eigen::Matrix<double, 8, 8>& H, const std::vector<int>& idx) {
  const int n = static_cast<int>(idx.size());
  Eigen::MatrixXd h(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) h(a, b) = H(idx[a], idx[b]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  std::vector<BlockState> out;
  for (int k = 0; k < n; ++k) out.push_back({0, es.eigenvectors().col(k), es.eigenvalues()(k)});
  return out;
}

} // namespace

std::string to_string(Manifold m) { return m == Manifold::S12 ? "5S1/2" : "5P1/2"; }

Manifold manifold_from_string(const std::string& s) {
  if (s == "5S1/2" || s == "S12" || s == "ground" || s == "g") return Manifold::S12;
  if (s == "5P1/2" || s == "P12" || s == "excited" || s == "e") return Manifold::P12;
  throw ConfigError("unknown manifold '" + s + "'");
}

std::string to_string(const LevelKey& k) {
  return to_string(k.manifold) + "(F=" + std::to_string(k.F) + (k.manifold == Manifold::P12 ? "'" : "") +
         ",mF=" + std::to_string(k.mF) + ")";
}

double basis_mI(int index) { return 1.5 - index / 2; }
double basis_mJ(int index) { return 0.5 - index % 2; }

Eigen::Matrix<double, 8, 8> breit_rabi_hamiltonian(Manifold m, double B, const SpectroscopicConstants& c) {
  const double I = c.nuclear_spin;
  const double A = A_of(m, c);
  const double gJ = gJ_of(m, c);
  Eigen::Matrix<double, 8, 8> H = Eigen::Matrix<double, 8, 8>::Zero();
  auto lower = [](double j, double mm) { return std::sqrt(j * (j + 1) - mm * (mm - 1)); };
  for (int a = 0; a < 8; ++a) {
    const double mI = basis_mI(a), mJ = basis_mJ(a);
    H(a, a) = A * mI * mJ + c.muB * B * (gJ * mJ + c.gI * mI);
    for (int b = 0; b < 8; ++b) {
      const double nI = basis_mI(b), nJ = basis_mJ(b);
      // (I+ J- + I- J+)/2
      if (mI == nI + 1 && mJ == nJ - 1) H(a, b) += 0.5 * A * lower(I, mI) * lower(J, nJ);
      if (mI == nI - 1 && mJ == nJ + 1) H(a, b) += 0.5 * A * lower(I, nI) * lower(J, mJ);
    }
  }
  return H;
}

std::vector<ZeemanLevel> zeeman_spectrum(Manifold m, double B, const SpectroscopicConstants& c) {
  if (!(B >= 0)) throw ConfigError("magnetic field must be >= 0 G");
  const double I = c.nuclear_spin;
  const double A = A_of(m, c);
  std::vector<ZeemanLevel> out;
  const int steps = B > 0 ? std::max(4, static_cast<int>(std::ceil(B / 0.5))) : 0;

  for (int mF = -2; mF <= 2; ++mF) {
    const auto idx = block(mF);
    // zero field: coupled states with Condon-Shortley phases
    auto states = diag_block(breit_rabi_hamiltonian(m, 0.0, c), idx);
    for (auto& s : states) {
      s.F = label_F(s.e, A, I);
      double ov = 0.0;
      for (size_t a = 0; a < idx.size(); ++a)
        ov += s.v(a) * clebsch_gordan(J, basis_mJ(idx[a]), I, basis_mI(idx[a]), s.F, mF);
      if (std::abs(std::abs(ov) - 1.0) > 1e-9)
        throw PhysicsError("zero-field eigenvector is not a pure F state in mF block " + std::to_string(mF));
      if (ov < 0) s.v = -s.v;
    }
    for (int k = 1; k <= steps; ++k) {
      const double b = B * k / steps;
      auto next = diag_block(breit_rabi_hamiltonian(m, b, c), idx);
      std::vector<BlockState> carried;
      for (const auto& prev : states) {
        int best = -1;
        double bo = 0.0, second = 0.0;
        for (size_t j = 0; j < next.size(); ++j) {
          const double o = std::abs(prev.v.dot(next[j].v));
          if (o > bo) { second = bo; bo = o; best = static_cast<int>(j); }
          else if (o > second) second = o;
        }
        if (bo - second < 0.1)
          throw PhysicsError("level crossing near B = " + std::to_string(b) + " G in " + to_string(m) +
                             " block mF=" + std::to_string(mF) + " involving F=" + std::to_string(prev.F));
        BlockState s = next[best];
        if (prev.v.dot(s.v) < 0) s.v = -s.v;
        s.F = prev.F;
        carried.push_back(s);
      }
      states = std::move(carried);
    }
    for (const auto& s : states) {
      ZeemanLevel L;
      L.manifold = m;
      L.F = s.F;
      L.mF = mF;
      L.B = B;
      L.energy = s.e;
      for (size_t a = 0; a < idx.size(); ++a) L.composition(idx[a]) = s.v(a);
      out.push_back(L);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const ZeemanLevel& a, const ZeemanLevel& b) {
    if (a.energy != b.energy) return a.energy < b.energy;
    return std::make_pair(a.F, a.mF) < std::make_pair(b.F, b.mF);
  });
  return out;
}

const ZeemanLevel& find_level(const std::vector<ZeemanLevel>& levels, int F, int mF) {
  for (const auto& l : levels)
    if (l.F == F && l.mF == mF) return l;
  throw ConfigError("no Zeeman state with F=" + std::to_string(F) + " mF=" + std::to_string(mF));
}

double magnetic_mismatch(double B, const LevelMap& map, const SpectroscopicConstants& c) {
  for (const auto& k : {map.s2, map.s3, map.x})
    if (k.manifold != Manifold::S12) throw ConfigError("|2>, |3>, |X> must be ground states");
  const auto g = zeeman_spectrum(Manifold::S12, B, c);
  const double E2 = find_level(g, map.s2.F, map.s2.mF).energy;
  const double E3 = find_level(g, map.s3.F, map.s3.mF).energy;
  const double EX = find_level(g, map.x.F, map.x.mF).energy;
  return (E2 - E3) - (E3 - EX);
}

DipoleElement dipole_element(const ZeemanLevel& lower, const ZeemanLevel& upper, int q,
                             const SpectroscopicConstants& c) {
  DipoleElement d{lower, upper, q, 0.0};
  if (upper.mF - lower.mF != q || std::abs(q) > 1) return d;
  // <J mJ| e r_qs |J' mJ'> with qs = mJ - mJ', diagonal in mI
  cplx sum = 0.0;
  for (int a = 0; a < 8; ++a) {
    if (lower.composition(a) == 0.0) continue;
    for (int b = 0; b < 8; ++b) {
      if (upper.composition(b) == 0.0 || basis_mI(a) != basis_mI(b)) continue;
      const double mJ = basis_mJ(a), mJp = basis_mJ(b);
      const double qs = mJ - mJp;
      if (std::abs(qs) > 1) continue;
      const double ang = ((std::lround(J - 1 + mJ) % 2 == 0) ? 1.0 : -1.0) * std::sqrt(2 * J + 1) *
                         wigner_3j(J, 1, J, mJp, qs, -mJ);
      sum += std::conj(lower.composition(a)) * ang * upper.composition(b);
    }
  }
  d.amplitude = sum.real() * c.reduced_dipole;
  return d;
}

double zero_field_dipole(int Fg, int mg, int Fe, int me, const SpectroscopicConstants& c) {
  const double I = c.nuclear_spin;
  const int qs = mg - me;
  if (std::abs(qs) > 1) return 0.0;
  auto sgn = [](double x) { return (std::lround(x) % 2 == 0) ? 1.0 : -1.0; };
  const double v = sgn(Fe + J + 1 + I) * std::sqrt((2.0 * Fe + 1) * (2 * J + 1)) *
                   wigner_6j(J, J, 1, Fe, Fg, I) * sgn(Fe - 1 + mg) * std::sqrt(2.0 * Fg + 1) *
                   wigner_3j(Fe, 1, Fg, me, qs, -mg);
  return v * c.reduced_dipole;
}

std::vector<Branch> branching_ratios(const ZeemanLevel& excited, const SpectroscopicConstants& c) {
  if (excited.manifold != Manifold::P12) throw ConfigError("branching ratios need an excited state");
  const auto g = zeeman_spectrum(Manifold::S12, excited.B, c);
  std::vector<Branch> out;
  double total = 0.0;
  for (const auto& l : g) {
    const int q = excited.mF - l.mF;
    if (std::abs(q) > 1) continue;
    const double a = dipole_element(l, excited, q, c).amplitude;
    if (a == 0.0) continue;
    out.push_back({l, a * a});
    total += a * a;
  }
  for (auto& b : out) b.fraction /= total;
  return out;
}

} // namespace deit
