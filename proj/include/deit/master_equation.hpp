#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "deit/analytic_models.hpp"
#include "deit/ode.hpp"
#include "deit/scheme_builder.hpp"

namespace deit {

class DensityMatrix {
 public:
  // validates Hermiticity, unit trace and positivity
  explicit DensityMatrix(MatrixXc m, double trace_tol = 1e-9);
  static DensityMatrix pure(int n, int k);
  static DensityMatrix diagonal(const std::vector<double>& p);

  const MatrixXc& matrix() const { return m_; }
  int dimension() const { return static_cast<int>(m_.rows()); }
  double population(int k) const { return m_(k, k).real(); }

  static double trace_error(const MatrixXc& m);
  static double hermiticity_error(const MatrixXc& m);
  static double min_eigenvalue(const MatrixXc& m);

 private:
  MatrixXc m_;
};

struct Channels {
  std::vector<DecayChannel> jumps; // sqrt(rate) |to><from|
  std::vector<DephasingChannel> dephasing;
  double transit_rate = 0.0;
  MatrixXc transit_target;
};

// Precomputed generator; apply() is the hot loop of evolve.
class Lindbladian {
 public:
  explicit Lindbladian(const SchemeHamiltonian& s);
  Lindbladian(const MatrixXc& H, const Channels& ch);
  void apply(const MatrixXc& rho, MatrixXc& drho) const;
  int dimension() const { return static_cast<int>(mH_.rows()); }
  bool trace_preserving() const { return trace_preserving_; }
  // dense row-major superoperator, for small-system checks
  MatrixXc superoperator() const;

 private:
  MatrixXc mH_, mHd_; // -i H, i H^dagger
  Eigen::VectorXd half_out_;
  std::vector<DecayChannel> jumps_;
  std::vector<DephasingChannel> dephasing_;
  double transit_ = 0.0;
  MatrixXc target_;
  bool trace_preserving_ = true;
};

MatrixXc lindblad_rhs(const MatrixXc& rho, const SchemeHamiltonian& s);

struct EvolveOptions {
  double rtol = 1e-8;
  double atol = 1e-12;
  std::vector<double> snapshots; // empty: cadence
  double cadence = 0.0;          // 0: only t_end
  bool keep_states = true;
  std::function<bool(double)> progress;
  std::function<void(double, const MatrixXc&)> observer;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  std::map<std::string, std::vector<double>> observables;
  double max_trace_error = 0.0;
  double max_hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;
  OdeStats stats;
};

Trajectory evolve(const DensityMatrix& rho0, const SchemeHamiltonian& s, double t_end, const EvolveOptions& opt = {});
Trajectory evolve(const DensityMatrix& rho0, const Lindbladian& L, double t_end, const EvolveOptions& opt = {});

enum class Projection { Scheme, All };
std::string to_string(Projection p);
Projection projection_from_string(const std::string& s);

std::vector<int> scheme_states(const SchemeHamiltonian& s);

// d_XPM(t) for `which`: scheme_off lacks the partner field.
std::vector<double> cross_dipole_num(const SchemeHamiltonian& scheme_on, const SchemeHamiltonian& scheme_off,
                                     const DensityMatrix& rho0, const std::vector<double>& t_grid, Field which,
                                     Projection proj = Projection::Scheme, const EvolveOptions& opt = {});

struct NumRunConfig {
  D1Config d1;
  double density = 0.0;
  Projection projection = Projection::Scheme;
  double dephasing_rate = 0.0;
  double transit_rate = 0.0;
  EvolveOptions evolve;
};

struct NumRun {
  XpmSeries series;
  Trajectory on; // states of the run with all fields on
  SchemeHamiltonian scheme_on;
};

// on, partner-off for field 1 and for field 2, run concurrently
NumRun num_cross_dipole(const NumRunConfig& cfg, const DensityMatrix& rho0, const std::vector<double>& t_grid);

struct PrepConfig {
  double pump_duration = 2e-6;
  double pump_rate = 0.0;   // 0: 10 gamma
  std::vector<LevelKey> repump_set; // empty: every ground state except |1>, |2>
  double repump_rate = 0.0; // 0: gamma
  double raman_efficiency = 0.0;
  double threshold = 0.005;
  double max_time = 200e-6;
  DipoleBasis basis = DipoleBasis::ZeroFieldCG;
  LevelMap map;
};

struct PrepResult {
  DensityMatrix rho; // 16-level, diagonal
  double p1 = 0.0, p2 = 0.0;
  double outside = 0.0; // population outside {|1>,|2>} when pumping stopped
  double time = 0.0;
  std::vector<double> populations; // before the swap
  std::vector<std::string> labels;
};

PrepResult prepare_mixture(const PrepConfig& prep, double B, const SpectroscopicConstants& c = rb87_d1());

// Ground-state dephasing on every state that never decays, and relaxation toward rho_mix.
SchemeHamiltonian add_motion_channels(const SchemeHamiltonian& s, double dephasing_rate, double transit_rate,
                                      const MatrixXc& rho_mix);

} // namespace deit
