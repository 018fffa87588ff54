#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "deit/errors.hpp"
#include "deit/runner.hpp"

namespace {

struct Args {
  std::string preset;
  std::vector<std::string> configs;
  std::vector<std::string> sets;
  std::string out;
  int workers = 1;
  std::optional<double> tol;
  std::vector<double> fields;
  bool quiet = false;
};

deit::Config assemble(const Args& a) {
  deit::Config c;
  if (!a.preset.empty()) c = deit::Config::preset(a.preset);
  else if (a.configs.empty()) throw deit::ConfigError("give --preset or --config");
  for (const auto& path : a.configs) c.merge(deit::Config::load(path));
  for (const auto& kv : a.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw deit::ConfigError("--set expects section.key=value, got '" + kv + "'");
    c.set(kv.substr(0, eq), kv.substr(eq + 1), "--set");
  }
  if (!a.preset.empty()) c.set("run.preset", a.preset, "--preset");
  return c;
}

int run(const Args& a) {
  deit::RunOptions opt;
  opt.out_dir = a.out.empty() ? "out" : a.out;
  opt.workers = a.workers;
  opt.tol = a.tol;
  if (!a.quiet) opt.log = [](const std::string& m) { std::cerr << m << "\n"; };
  const auto report = deit::run(assemble(a), opt);
  for (const auto& f : report.files) std::cout << f << "\n";
  return 0;
}

int validate(const Args& a) {
  int code = 0;
  for (const auto& d : deit::validate(assemble(a))) {
    std::cout << deit::to_string(d.level) << ": " << d.message << "\n";
    if (d.level == deit::Diagnostic::Error) code = 2;
  }
  if (code == 0) std::cout << "ok\n";
  return code;
}

int dump_structure(const Args& a) {
  std::vector<double> B = a.fields;
  if (B.empty()) {
    if (!a.preset.empty() || !a.configs.empty()) {
      for (const auto& p : deit::expand_sweep(assemble(a))) B.push_back(p.quantity("structure.B"));
    } else {
      B = {150.0};
    }
  }
  for (double b : B)
    if (b < 0) throw deit::ConfigError("--B must be >= 0");
  const auto csv = deit::dump_structure_csv(B);
  if (a.out.empty()) {
    std::cout << csv;
  } else {
    std::ofstream f(a.out, std::ios::binary);
    if (!f) throw deit::ConfigError("cannot write " + a.out);
    f << csv;
  }
  return 0;
}

int estimate(const Args& a) {
  std::cout << deit::estimate_table(assemble(a));
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Double-EIT cross-phase modulation toolkit"};
  app.require_subcommand(1);
  Args a;
  auto common = [&](CLI::App* s) {
    s->add_option("--preset", a.preset, "fig2, phase-shift, state-prep, max-phase, hot-gas, custom");
    s->add_option("--config", a.configs, "config file, repeatable, later files override earlier ones");
    s->add_option("--set", a.sets, "section.key=value override, repeatable");
    s->add_option("--workers", a.workers, "concurrent sweep points")->check(CLI::PositiveNumber);
    s->add_option("--tol", a.tol, "integrator relative tolerance");
    s->add_flag("-q,--quiet", a.quiet);
  };
  auto* r = app.add_subcommand("run", "run a preset or config, write CSV files");
  common(r);
  r->add_option("--out", a.out, "output directory (default ./out)");
  auto* v = app.add_subcommand("validate", "check a config without running it");
  common(v);
  auto* d = app.add_subcommand("dump-structure", "Zeeman levels of both manifolds as CSV");
  common(d);
  d->add_option("--B", a.fields, "field values in gauss");
  d->add_option("--out", a.out, "output file (default stdout)");
  auto* e = app.add_subcommand("estimate", "pulse and maximum phase estimates");
  common(e);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex);
    return 1;
  }

  try {
    if (r->parsed()) return run(a);
    if (v->parsed()) return validate(a);
    if (d->parsed()) return dump_structure(a);
    if (e->parsed()) return estimate(a);
  } catch (const deit::ConfigError& ex) {
    std::cerr << "config error: " << ex.what() << "\n";
    return 1;
  } catch (const deit::IntegrationError& ex) {
    std::cerr << "integration error: " << ex.what() << " (t = " << ex.time << " s, last step " << ex.last_step
              << " s)\n";
    return 2;
  } catch (const deit::PhysicsError& ex) {
    std::cerr << "physics error: " << ex.what() << "\n";
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  return 0;
}
