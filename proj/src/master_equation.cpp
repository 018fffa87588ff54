#include "deit/master_equation.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <set>

#include "deit/errors.hpp"

namespace deit {

DensityMatrix::DensityMatrix(MatrixXc m, double trace_tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) throw PhysicsError("density matrix must be square and non-empty");
  if (const double h = hermiticity_error(m_); h > 1e-12)
    throw PhysicsError("density matrix not Hermitian (" + std::to_string(h) + ")");
  if (const double t = trace_error(m_); t > trace_tol)
    throw PhysicsError("density matrix trace off by " + std::to_string(t));
  if (const double e = min_eigenvalue(m_); e < -1e-9)
    throw PhysicsError("density matrix has negative eigenvalue " + std::to_string(e));
}

DensityMatrix DensityMatrix::pure(int n, int k) {
  MatrixXc m = MatrixXc::Zero(n, n);
  m(k, k) = 1.0;
  return DensityMatrix(m);
}

DensityMatrix DensityMatrix::diagonal(const std::vector<double>& p) {
  const int n = static_cast<int>(p.size());
  MatrixXc m = MatrixXc::Zero(n, n);
  for (int k = 0; k < n; ++k) m(k, k) = p[k];
  return DensityMatrix(m);
}

double DensityMatrix::trace_error(const MatrixXc& m) { return std::abs(m.trace() - 1.0); }

double DensityMatrix::hermiticity_error(const MatrixXc& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

double DensityMatrix::min_eigenvalue(const MatrixXc& m) {
  const MatrixXc h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Lindbladian::Lindbladian(const SchemeHamiltonian& s)
    : Lindbladian(s.matrix, Channels{s.decay, s.dephasing, s.transit_rate, s.transit_target}) {}

Lindbladian::Lindbladian(const MatrixXc& H, const Channels& ch)
    : mH_(-I_ * H), mHd_(I_ * H.adjoint()), jumps_(ch.jumps), dephasing_(ch.dephasing), transit_(ch.transit_rate),
      target_(ch.transit_target) {
  const int n = static_cast<int>(H.rows());
  half_out_ = Eigen::VectorXd::Zero(n);
  for (const auto& j : jumps_) {
    if (j.rate < 0) throw PhysicsError("negative decay rate");
    if (j.from < 0 || j.from >= n || j.to < 0 || j.to >= n) throw PhysicsError("decay channel out of range");
    half_out_(j.from) += 0.5 * j.rate;
  }
  for (const auto& d : dephasing_) {
    if (d.rate < 0) throw PhysicsError("negative dephasing rate");
    if (d.state < 0 || d.state >= n) throw PhysicsError("dephasing channel out of range");
    half_out_(d.state) += d.rate;
  }
  if (transit_ < 0) throw PhysicsError("negative transit rate");
  if (transit_ > 0 && (target_.rows() != n || target_.cols() != n))
    throw PhysicsError("transit target has the wrong dimension");
  const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
  trace_preserving_ = (H - H.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale &&
                      (transit_ == 0.0 || std::abs(target_.trace() - 1.0) < 1e-12);
}

void Lindbladian::apply(const MatrixXc& rho, MatrixXc& drho) const {
  const int n = static_cast<int>(rho.rows());
  drho.noalias() = mH_ * rho;
  drho.noalias() += rho * mHd_;
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a) drho(a, b) -= (half_out_(a) + half_out_(b)) * rho(a, b);
  for (const auto& j : jumps_) drho(j.to, j.to) += j.rate * rho(j.from, j.from);
  for (const auto& d : dephasing_) drho(d.state, d.state) += 2.0 * d.rate * rho(d.state, d.state);
  if (transit_ > 0) drho += transit_ * (target_ * rho.trace() - rho);
}

MatrixXc Lindbladian::superoperator() const {
  const int n = dimension();
  MatrixXc S(n * n, n * n);
  MatrixXc e = MatrixXc::Zero(n, n), d(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      e.setZero();
      e(a, b) = 1.0;
      apply(e, d);
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) S(x * n + y, a * n + b) = d(x, y);
    }
  return S;
}

MatrixXc lindblad_rhs(const MatrixXc& rho, const SchemeHamiltonian& s) {
  if (rho.rows() != s.dimension || rho.cols() != s.dimension)
    throw PhysicsError("density matrix dimension " + std::to_string(rho.rows()) + " does not match scheme dimension " +
                       std::to_string(s.dimension));
  MatrixXc d(rho.rows(), rho.cols());
  Lindbladian(s).apply(rho, d);
  return d;
}

Trajectory evolve(const DensityMatrix& rho0, const SchemeHamiltonian& s, double t_end, const EvolveOptions& opt) {
  if (rho0.dimension() != s.dimension) throw PhysicsError("initial state dimension does not match the scheme");
  return evolve(rho0, Lindbladian(s), t_end, opt);
}

Trajectory evolve(const DensityMatrix& rho0, const Lindbladian& L, double t_end, const EvolveOptions& opt) {
  if (!(opt.rtol > 0)) throw PhysicsError("tolerance must be > 0");
  if (!(t_end >= 0)) throw PhysicsError("end time must be >= 0");
  if (rho0.dimension() != L.dimension()) throw PhysicsError("initial state dimension does not match the generator");
  std::vector<double> times = opt.snapshots;
  if (times.empty()) {
    if (opt.cadence > 0)
      for (long k = 1; k * opt.cadence < t_end * (1 - 1e-12); ++k) times.push_back(k * opt.cadence);
    times.push_back(t_end);
  }
  for (size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw PhysicsError("snapshot times must be strictly increasing");

  Trajectory tr;
  const bool tp = L.trace_preserving();
  const double breach = 10.0 * opt.rtol;
  MatrixXc y = rho0.matrix();
  tr.min_eigenvalue = DensityMatrix::min_eigenvalue(y);
  auto hook = [&](double t, const MatrixXc& r) {
    const double h = DensityMatrix::hermiticity_error(r);
    tr.max_hermiticity_error = std::max(tr.max_hermiticity_error, h);
    if (h > breach) throw IntegrationError("hermiticity lost", t, 0.0, h);
    if (tp) {
      const double te = DensityMatrix::trace_error(r);
      tr.max_trace_error = std::max(tr.max_trace_error, te);
      if (te > breach) throw IntegrationError("trace drifted", t, 0.0, te);
    }
  };
  auto obs = [&](double t, const MatrixXc& r) {
    const double e = DensityMatrix::min_eigenvalue(r);
    tr.min_eigenvalue = std::min(tr.min_eigenvalue, e);
    if (tp && e < -breach) throw IntegrationError("positivity lost", t, 0.0, e);
    tr.times.push_back(t);
    if (opt.keep_states)
      tr.states.emplace_back(r, tp ? std::max(1e-9, breach) : std::numeric_limits<double>::infinity());
    for (int k = 0; k < r.rows(); ++k) tr.observables["p" + std::to_string(k)].push_back(r(k, k).real());
    if (opt.observer) opt.observer(t, r);
  };
  auto rhs = [&](double, const MatrixXc& r, MatrixXc& d) { L.apply(r, d); };
  OdeOptions o;
  o.rtol = opt.rtol;
  o.atol = opt.atol;
  o.progress = opt.progress;
  tr.stats = integrate_dopri5(rhs, y, 0.0, times, obs, o, hook);
  return tr;
}

std::string to_string(Projection p) { return p == Projection::Scheme ? "scheme" : "all"; }

Projection projection_from_string(const std::string& s) {
  if (s == "scheme") return Projection::Scheme;
  if (s == "all") return Projection::All;
  throw ConfigError("unknown projection '" + s + "' (scheme | all)");
}

std::vector<int> scheme_states(const SchemeHamiltonian& s) {
  std::vector<int> v;
  for (const char* r : {"1", "2", "3", "4", "5", "6", "7"})
    if (auto it = s.role.find(r); it != s.role.end()) v.push_back(it->second);
  return v;
}

namespace {

void polarization_series(const SchemeHamiltonian& s, const DensityMatrix& rho0, const std::vector<double>& grid,
                                      std::vector<Field> fields, Projection proj, const EvolveOptions& base,
                                      std::vector<std::vector<cplx>>& out, Trajectory* keep) {
  const auto states = scheme_states(s);
  const std::vector<int>* sel = proj == Projection::Scheme ? &states : nullptr;
  out.assign(fields.size(), {});
  EvolveOptions o = base;
  o.snapshots = grid;
  o.keep_states = keep != nullptr;
  auto user = base.observer;
  o.observer = [&](double t, const MatrixXc& r) {
    for (size_t f = 0; f < fields.size(); ++f) out[f].push_back(polarization(r, s, fields[f], sel));
    if (user) user(t, r);
  };
  auto tr = evolve(rho0, s, grid.back(), o);
  if (keep) *keep = std::move(tr);
}

} // namespace

std::vector<double> cross_dipole_num(const SchemeHamiltonian& on, const SchemeHamiltonian& off, const DensityMatrix& rho0,
                                     const std::vector<double>& t_grid, Field which, Projection proj,
                                     const EvolveOptions& opt) {
  if (which == Field::Pump) throw PhysicsError("cross dipole is defined for the signal fields");
  std::vector<std::vector<cplx>> a, b;
  polarization_series(on, rho0, t_grid, {which}, proj, opt, a, nullptr);
  polarization_series(off, rho0, t_grid, {which}, proj, opt, b, nullptr);
  std::vector<double> d(t_grid.size());
  for (size_t k = 0; k < d.size(); ++k) d[k] = (std::abs(a[0][k]) - std::abs(b[0][k])) / si::ea0;
  return d;
}

NumRun num_cross_dipole(const NumRunConfig& cfg, const DensityMatrix& rho0, const std::vector<double>& t_grid) {
  auto build = [&](int off) {
    D1Config d = cfg.d1;
    if (off >= 0) d.rabi[off] = 0.0;
    auto s = build_full_d1(d);
    if (cfg.dephasing_rate > 0 || cfg.transit_rate > 0)
      s = add_motion_channels(s, cfg.dephasing_rate, cfg.transit_rate, rho0.matrix());
    return s;
  };
  NumRun run;
  run.scheme_on = build(-1);
  const auto off1 = build(1), off2 = build(0);
  std::vector<std::vector<cplx>> pon, poff1, poff2;
  auto f_on = std::async(std::launch::async, [&] {
    polarization_series(run.scheme_on, rho0, t_grid, {Field::Signal1, Field::Signal2}, cfg.projection, cfg.evolve, pon,
                        &run.on);
  });
  auto f1 = std::async(std::launch::async, [&] {
    polarization_series(off1, rho0, t_grid, {Field::Signal1}, cfg.projection, cfg.evolve, poff1, nullptr);
  });
  polarization_series(off2, rho0, t_grid, {Field::Signal2}, cfg.projection, cfg.evolve, poff2, nullptr);
  f_on.get();
  f1.get();
  run.series.t = t_grid;
  run.series.P_on = {pon[0], pon[1]};
  run.series.P_off = {poff1[0], poff2[0]};
  run.series.E = {run.scheme_on.amplitude[0], run.scheme_on.amplitude[1]};
  run.series.density = cfg.density;
  return run;
}

PrepResult prepare_mixture(const PrepConfig& prep, double B, const SpectroscopicConstants& c) {
  if (prep.raman_efficiency < 0 || prep.raman_efficiency > 1) throw ConfigError("raman_efficiency must lie in [0, 1]");
  D1Config d;
  d.B = B;
  d.map = prep.map;
  d.basis = prep.basis;
  d.gamma = c.gamma;
  const auto s = build_full_d1(d, c);
  const int n = s.dimension;
  const int i1 = s.role.at("1"), i2 = s.role.at("2"), i4 = s.role.at("4");
  const double R = prep.pump_rate > 0 ? prep.pump_rate : 10.0 * c.gamma;
  const double Rr = prep.repump_rate > 0 ? prep.repump_rate : c.gamma;

  std::set<int> repump;
  if (prep.repump_set.empty()) {
    for (int k = 0; k < 8; ++k)
      if (k != i1 && k != i2) repump.insert(k);
  } else {
    for (const auto& key : prep.repump_set) {
      bool found = false;
      for (int k = 0; k < 8; ++k)
        if (s.labels[k] == "g(" + std::to_string(key.F) + "," + std::to_string(key.mF) + ")") {
          repump.insert(k);
          found = true;
        }
      if (!found) throw ConfigError("repump state " + to_string(key) + " is not a ground state");
    }
  }

  const MatrixXc H = MatrixXc::Zero(n, n);
  Channels pump{s.decay, {}, 0.0, {}};
  for (int k = 0; k < 8; ++k) pump.jumps.push_back({k, i4, R});
  Channels re{s.decay, {}, 0.0, {}};
  for (int k : repump) re.jumps.push_back({k, i4, Rr});

  std::vector<double> p0(n, 0.0);
  for (int k = 0; k < 8; ++k) p0[k] = 1.0 / 8;
  EvolveOptions o;
  o.keep_states = false;
  MatrixXc rho;
  o.observer = [&](double, const MatrixXc& r) { rho = r; };
  evolve(DensityMatrix::diagonal(p0), Lindbladian(H, pump), prep.pump_duration, o);

  const Lindbladian Lre(H, re);
  const double chunk = 1e-6;
  double t = prep.pump_duration;
  auto outside = [&] { return 1.0 - rho(i1, i1).real() - rho(i2, i2).real(); };
  while (outside() >= prep.threshold) {
    if (t >= prep.max_time) {
      int worst = -1;
      double wp = -1;
      for (int k = 0; k < n; ++k)
        if (k != i1 && k != i2 && rho(k, k).real() > wp) {
          wp = rho(k, k).real();
          worst = k;
        }
      throw PhysicsError("optical pumping does not converge: " + std::to_string(100 * wp) + "% trapped in " +
                         s.labels[worst]);
    }
    const MatrixXc start = 0.5 * (rho + rho.adjoint());
    evolve(DensityMatrix(start, 1e-7), Lre, chunk, o);
    t += chunk;
  }

  PrepResult r{DensityMatrix::pure(n, i1), 0.0, 0.0, 0.0, 0.0, {}, {}};
  r.outside = outside();
  r.time = t;
  for (int k = 0; k < n; ++k) r.populations.push_back(rho(k, k).real());
  r.labels = s.labels;
  const double P1 = rho(i1, i1).real(), P2 = rho(i2, i2).real();
  const double q1 = P1 / (P1 + P2), q2 = P2 / (P1 + P2);
  const double e = prep.raman_efficiency;
  r.p1 = (1 - e) * q1 + e * q2;
  r.p2 = (1 - e) * q2 + e * q1;
  std::vector<double> mix(n, 0.0);
  mix[i1] = r.p1;
  mix[i2] = r.p2;
  r.rho = DensityMatrix::diagonal(mix);
  return r;
}

SchemeHamiltonian add_motion_channels(const SchemeHamiltonian& s, double dephasing_rate, double transit_rate,
                                      const MatrixXc& rho_mix) {
  if (dephasing_rate < 0 || transit_rate < 0) throw PhysicsError("motion rates must be >= 0");
  SchemeHamiltonian r = s;
  if (dephasing_rate > 0) {
    std::set<int> decaying;
    for (const auto& d : s.decay) decaying.insert(d.from);
    // half per state: a coherence between two ground states then decays at dephasing_rate
    for (int k = 0; k < s.dimension; ++k)
      if (!decaying.count(k)) r.dephasing.push_back({k, 0.5 * dephasing_rate});
  }
  if (transit_rate > 0) {
    if (rho_mix.rows() != s.dimension) throw PhysicsError("transit target dimension mismatch");
    r.transit_rate = transit_rate;
    r.transit_target = rho_mix;
  }
  return r;
}

} // namespace deit
