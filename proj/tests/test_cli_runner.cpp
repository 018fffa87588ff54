#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "deit/errors.hpp"
#include "deit/runner.hpp"

using namespace deit;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("deit_test_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(p);
  return p;
}

// column values of a CSV with '#' comment lines
std::vector<std::string> column(const std::string& csv, const std::string& name) {
  std::istringstream in(csv);
  std::string line;
  std::vector<std::string> head, out;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    if (head.empty()) {
      head = cells;
      continue;
    }
    for (size_t i = 0; i < head.size(); ++i)
      if (head[i] == name) out.push_back(cells.at(i));
  }
  return out;
}

int cli(const std::string& args) {
  const char* exe = std::getenv("DEIT_CLI");
  REQUIRE(exe != nullptr);
  const int st = std::system((std::string(exe) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

} // namespace

TEST_CASE("config: units are mandatory and converted") {
  const auto c = Config::parse("[fields]\nOmega1 = 0.68 MHz\ndelta1 = 2 kHz\n[medium]\ndensity = 1e14 cm^-3\n"
                               "length = 1.6 mm\n[structure]\nB = 75 G\n",
                               "t.cfg");
  CHECK(c.quantity("fields.Omega1") == doctest::Approx(mhz(0.68)));
  CHECK(c.quantity("fields.delta1") == doctest::Approx(khz(2.0)));
  CHECK(c.quantity("medium.density") == doctest::Approx(1e20));
  CHECK(c.quantity("medium.length") == doctest::Approx(1.6e-3));
  CHECK(c.quantity("structure.B") == 75.0);
  // untouched keys fall back to defaults
  CHECK(c.quantity("medium.gamma") == doctest::Approx(mhz(5.73)));
  CHECK_FALSE(c.has("medium.gamma"));
}

TEST_CASE("config: diagnostics carry file, line and key") {
  CHECK_THROWS_WITH_AS(Config::parse("[fields]\n\nOmega1 = 0.68\n", "a.cfg"),
                       doctest::Contains("a.cfg:3: fields.Omega1: missing unit"), ConfigError);
  CHECK_THROWS_WITH_AS(Config::parse("[fields]\nOmega1 = 0.68 mm\n", "a.cfg"), doctest::Contains("is not a"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(Config::parse("[fields]\nOmega1 = 0.68 furlong\n", "a.cfg"),
                       doctest::Contains("unknown unit"), ConfigError);
  CHECK_THROWS_WITH_AS(Config::parse("[fields]\nOmega9 = 1 MHz\n", "a.cfg"),
                       doctest::Contains("a.cfg:2: unknown key 'fields.Omega9'"), ConfigError);
  CHECK_THROWS_WITH_AS(Config::parse("Omega1 = 1 MHz\n", "a.cfg"), doctest::Contains("outside a section"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(Config::parse("[fields\n", "a.cfg"), doctest::Contains("unterminated"), ConfigError);
  CHECK_THROWS_WITH_AS(Config::parse("[fields]\nOmega1 1 MHz\n", "a.cfg"), doctest::Contains("expected key = value"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(Config::parse("[fields]\nOmega1 = x MHz\n", "a.cfg"), doctest::Contains("expected a number"),
                       ConfigError);
  CHECK_THROWS_AS(Config::load("/nonexistent/x.cfg"), ConfigError);
  CHECK_THROWS_AS(Config::preset("fig3"), ConfigError);
}

TEST_CASE("config: layering and overrides") {
  auto base = Config::preset("fig2");
  base.merge(Config::parse("[structure]\nB = 100 G\n", "over.cfg"));
  CHECK(base.quantity("structure.B") == 100.0);
  CHECK(base.quantity("fields.Omega1") == doctest::Approx(mhz(0.68)));
  base.set("medium.p1", "0.5");
  CHECK(base.quantity("medium.p1") == 0.5);
  CHECK_THROWS_AS(base.set("medium.length", "3"), ConfigError);
  CHECK_THROWS_AS(base.set("medium.nothing", "3"), ConfigError);
  const auto dump = base.dump();
  for (const auto& [k, spec] : config_schema()) CHECK(dump.find(k + " = ") != std::string::npos);
}

TEST_CASE("config: level map") {
  const auto m = config_level_map(Config::preset("fig2"));
  CHECK(m.s4.manifold == Manifold::P12);
  CHECK(m.s4.F == 2);
  CHECK(m.s4.mF == 1);
  CHECK(m.x.mF == -2);
  auto c = Config::preset("fig2");
  c.set("structure.level_map", "1=g(1,0) 1=g(2,2)");
  CHECK_THROWS_WITH_AS(config_level_map(c), doctest::Contains("assigned twice"), ConfigError);
  c.set("structure.level_map", "4=g(1,0)");
  CHECK_THROWS_AS(config_level_map(c), ConfigError);
  c.set("structure.level_map", "1=q(1,0)");
  CHECK_THROWS_AS(config_level_map(c), ConfigError);
}

TEST_CASE("sweep: cartesian product with a shared unit") {
  auto c = Config::preset("custom");
  c.merge(Config::parse("[sweep]\nstructure.B = 0, 50, 150 G\nmedium.p1 = 0.4, 0.5\n", "s.cfg"));
  const auto pts = expand_sweep(c);
  REQUIRE(pts.size() == 6);
  CHECK(pts[0].quantity("structure.B") == 0.0);
  CHECK(pts[5].quantity("structure.B") == 150.0);
  CHECK(pts[5].quantity("medium.p1") == 0.5);
  CHECK_THROWS_WITH_AS(Config::parse("[sweep]\nfields.Nope = 1, 2 MHz\n", "s.cfg"),
                       doctest::Contains("not a known key"), ConfigError);
  CHECK_THROWS_WITH_AS(Config::parse("[sweep]\nstructure.B =\n", "s.cfg"), doctest::Contains("empty range"),
                       ConfigError);
}

TEST_CASE("validate") {
  const auto fig2 = validate(Config::preset("fig2"));
  for (const auto& d : fig2) CHECK(d.level != Diagnostic::Error);
  for (const auto& d : fig2) CHECK(d.level != Diagnostic::Warning);

  auto c = Config::preset("fig2");
  c.set("fields.Omega1", "4.06 MHz");
  bool warned = false;
  for (const auto& d : validate(c)) warned |= d.level == Diagnostic::Warning && d.message.find("perturbative") != std::string::npos;
  CHECK(warned);

  c = Config::preset("fig2");
  c.set("fields.Delta", "0 MHz");
  bool error = false;
  for (const auto& d : validate(c)) error |= d.level == Diagnostic::Error;
  CHECK(error);

  // automatic detunings put |5> on resonance at zero field
  c = Config::preset("custom");
  c.set("structure.B", "0 G");
  error = false;
  for (const auto& d : validate(c)) error |= d.level == Diagnostic::Error && d.message.find("Delta = 0") != std::string::npos;
  CHECK(error);

  // without a field |X> sits inside the window
  c = Config::preset("fig2");
  c.set("structure.B", "0 G");
  bool leak = false;
  for (const auto& d : validate(c)) leak |= d.message.find("leakage") != std::string::npos;
  CHECK(leak);
}

TEST_CASE("run: custom preset without a sweep is a single point") {
  const auto out = scratch("single");
  RunOptions opt;
  opt.out_dir = out.string();
  const auto r = run(Config::preset("custom"), opt);
  CHECK(r.points.size() == 1);
  const auto summary = slurp(out / "summary.csv");
  CHECK(column(summary, "B_G").size() == 1);
  CHECK(summary.find("# run.preset = custom") != std::string::npos);
  CHECK(fs::exists(out / "dxpm_series.csv"));
  fs::remove_all(out);
}

TEST_CASE("run: sweep over B gives the mismatch column") {
  auto c = Config::preset("custom");
  // Delta from the structure vanishes at B = 0, so pin the far detunings
  c.merge(Config::parse("[fields]\nDelta = -134.58 MHz\nDelta1 = 894.93 MHz\nDelta2 = 621.85 MHz\n"
                        "[sweep]\nstructure.B = 0, 50, 100, 150 G\n",
                        "s.cfg"));
  const auto out = scratch("sweep");
  RunOptions opt;
  opt.out_dir = out.string();
  opt.workers = 3;
  run(c, opt);
  const auto col = column(slurp(out / "summary.csv"), "delta_mag_MHz");
  REQUIRE(col.size() == 4);
  double prev = -1;
  const double B[] = {0, 50, 100, 150};
  for (int i = 0; i < 4; ++i) {
    const double v = std::stod(col[i]);
    CHECK(v == doctest::Approx(to_mhz(magnetic_mismatch(B[i]))).epsilon(1e-9));
    CHECK(std::abs(v) > prev);
    prev = std::abs(v);
  }
  CHECK(std::stod(col[3]) == doctest::Approx(-12.93).epsilon(1e-3));
  CHECK(fs::exists(out / "dxpm_series_4.csv"));
  fs::remove_all(out);
}

TEST_CASE("run: output is byte-identical across runs and worker counts") {
  auto c = Config::preset("phase-shift");
  c.merge(Config::parse("[sweep]\nfields.Omega2 = -0.55, -0.3 MHz\n", "s.cfg"));
  const auto a = scratch("det_a"), b = scratch("det_b");
  RunOptions opt;
  opt.out_dir = a.string();
  opt.workers = 2;
  run(c, opt);
  opt.out_dir = b.string();
  opt.workers = 1;
  run(c, opt);
  for (const char* f : {"summary.csv", "dxpm_series_1.csv", "dxpm_series_2.csv"}) CHECK(slurp(a / f) == slurp(b / f));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("run: validation errors stop the run") {
  auto c = Config::preset("phase-shift");
  c.set("fields.Delta", "0 MHz");
  RunOptions opt;
  opt.out_dir = scratch("bad").string();
  CHECK_THROWS_AS(run(c, opt), PhysicsError);
}

TEST_CASE("structure dump and estimate table") {
  const auto csv = dump_structure_csv({0.0, 150.0});
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "manifold,F,mF,B,energy_MHz");
  int n = 0;
  while (std::getline(in, line)) ++n;
  CHECK(n == 32);
  const auto t = estimate_table(Config::preset("max-phase"));
  CHECK(t.find("phi_max") != std::string::npos);
  CHECK(t.find("-0.0994") != std::string::npos);
}

TEST_CASE("command line: exit codes") {
  CHECK(cli("--help") == 0);
  CHECK(cli("frobnicate") == 1);
  CHECK(cli("validate --preset fig2") == 0);
  CHECK(cli("validate --preset fig2 --set fields.Delta='0 MHz'") == 2);
  CHECK(cli("validate --preset nope") == 1);
  CHECK(cli("validate --config /nonexistent.cfg") == 1);
  CHECK(cli("run --preset fig2 --set fields.Omega1=3") == 1);
  CHECK(cli("estimate --preset max-phase") == 0);
  const auto out = scratch("dump.csv");
  CHECK(cli("dump-structure --B 0 150 --out " + out.string()) == 0);
  CHECK(column(slurp(out), "energy_MHz").size() == 32);
  fs::remove(out);
  const auto cfg = scratch("bad.cfg");
  std::ofstream(cfg) << "[fields]\nOmega1 = 0.68\n";
  CHECK(cli("run --config " + cfg.string()) == 1);
  fs::remove(cfg);
}

TEST_CASE("command line: fig2 preset reports phi1 near 1.11 rad") {
  const auto out = scratch("fig2");
  CHECK(cli("run --preset fig2 --workers 2 --out " + out.string()) == 0);
  const auto s = slurp(out / "summary.csv");
  const double phi1 = std::stod(column(s, "eat_phi1").at(0));
  CHECK(std::abs(phi1 - 1.11) < 0.111);
  for (const char* c : {"sat_dxpm1_ea0", "eat_dxpm1_ea0", "num_dxpm1_ea0"}) CHECK(column(slurp(out / "dxpm_series.csv"), c).size() == 200);
  fs::remove_all(out);
}
