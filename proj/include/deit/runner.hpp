#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "deit/analytic_models.hpp"
#include "deit/config.hpp"
#include "deit/master_equation.hpp"
#include "deit/pulse_propagation.hpp"

namespace deit {

// --- scenario assembly from a resolved config ---
SpectroscopicConstants config_constants(const Config& c);
LevelMap config_level_map(const Config& c);
Detunings config_detunings(const Config& c);
FieldSet config_fieldset(const Config& c);
EatRunConfig config_eat(const Config& c);
NumRunConfig config_num(const Config& c);
MediumParams config_medium(const Config& c);
std::vector<double> config_times(const Config& c);
DensityMatrix config_initial_state(const Config& c, const SchemeHamiltonian& full);

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// One sweep point: named scalar results plus optional tables.
struct PointResult {
  std::vector<std::pair<std::string, double>> values;
  std::vector<Table> tables;
  std::vector<std::string> notes;
  double get(const std::string& key) const;
};

PointResult run_point(const Config& c);

struct Diagnostic {
  enum Level { Info, Warning, Error } level;
  std::string message;
};
std::string to_string(Diagnostic::Level l);
std::vector<Diagnostic> validate(const Config& c);

struct RunOptions {
  std::string out_dir = ".";
  int workers = 1;
  std::optional<double> tol;
  std::function<void(const std::string&)> log;
};

struct RunReport {
  std::vector<std::string> files;
  std::vector<PointResult> points;
};

// Expand the sweep, evaluate points on a worker pool, write CSVs from one collector.
RunReport run(const Config& c, const RunOptions& opt);
std::vector<Config> expand_sweep(const Config& c);

std::string dump_structure_csv(const std::vector<double>& B, const SpectroscopicConstants& k = rb87_d1());
std::string estimate_table(const Config& c);
std::string format_number(double v);

} // namespace deit
