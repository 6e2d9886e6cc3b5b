#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qqm/errors.hpp"
#include "qqm/scenario.hpp"

using namespace qqm;

namespace {

bool mentions(const std::vector<std::string>& msgs, const std::string& needle) {
  return std::any_of(msgs.begin(), msgs.end(),
                     [&](const std::string& m) { return m.find(needle) != std::string::npos; });
}

const char* minimal = R"(
name = tiny
[grid]
dims = 1
n = 32
length = 8
[evolve]
dt = 0.01
t_final = 0.1
record_every = 2
)";

}  // namespace

TEST_CASE("minimal config picks up defaults") {
  const ParseResult r = parse_config(minimal);
  REQUIRE(r.errors.empty());
  REQUIRE(r.config);
  const ScenarioConfig& c = *r.config;
  CHECK(c.name == "tiny");
  CHECK(c.equation == Equation::right);
  CHECK(c.grid.n == 32);
  CHECK(c.units.hbar == 1.0);
  CHECK(c.state.kind == "gaussian");
  CHECK(c.state.q0 == Quaternion(1.0));
  CHECK(c.potentials.empty());
  CHECK(c.gauges.empty());
  CHECK(c.resolution_scale == 1);
}

TEST_CASE("q0 is normalized with a warning") {
  std::string text = std::string(minimal) + "[state]\nq0 = 1, 1, 0, 0\n";
  const ParseResult r = parse_config(text);
  REQUIRE(r.errors.empty());
  const Quaternion q = r.config->state.q0;
  CHECK(q.x0() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(q.x1() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(mentions(r.warnings, "q0"));
}

TEST_CASE("bad enum value lists the allowed ones") {
  const ParseResult r = parse_config(std::string("equation = sideways\n") + minimal);
  CHECK_FALSE(r.config);
  REQUIRE(r.errors.size() == 1);
  CHECK(mentions(r.errors, "line 1"));
  CHECK(mentions(r.errors, "sideways"));
  CHECK(mentions(r.errors, "right, left"));
}

TEST_CASE("every error is reported with its line") {
  const char* text = R"(name = broken
equation = up
[grid]
dims = 7
colour = blue
[potential]
family = nonsense
[evolve]
dt = -1
)";
  const ParseResult r = parse_config(text);
  CHECK_FALSE(r.config);
  CHECK(r.errors.size() >= 4);
  CHECK(mentions(r.errors, "line 2"));
  CHECK(mentions(r.errors, "line 4"));
  CHECK(mentions(r.errors, "line 5"));
  CHECK(mentions(r.errors, "colour"));
  CHECK(mentions(r.errors, "nonsense"));
}

TEST_CASE("unknown section and duplicate key") {
  const ParseResult r = parse_config(std::string(minimal) + "[extras]\nfoo = 1\n[grid]\nn = 64\n");
  CHECK(mentions(r.errors, "extras"));
  CHECK(r.errors.size() >= 2);
}

TEST_CASE("cross-field constraints") {
  SUBCASE("lorentz needs 3D") {
    const ParseResult r = parse_config(std::string(minimal) + "[checks]\nsuites = lorentz\n");
    CHECK(mentions(r.errors, "lorentz"));
  }
  SUBCASE("t_final must be a multiple of dt") {
    const ParseResult r = parse_config(R"(
[grid]
n = 32
[evolve]
dt = 0.03
t_final = 0.1
)");
    CHECK(mentions(r.errors, "t_final"));
  }
}

TEST_CASE("format_config round trips") {
  const char* text = R"(
name = round
equation = left
[grid]
dims = 3
n = 8
length = 6
[potential]
family = harmonic
omega = 0.5
[potential]
family = complex-w
w0 = 0.1 + 0.2i
[state]
kind = gaussian
x0 = 0.5, 0, 0
k0 = 0.25, 0, 0
sigma = 0.9
q0 = 0, 0, 1, 0
[evolve]
dt = 0.01
t_final = 0.05
record_every = 1
[checks]
suites = norm, left-right
)";
  const ParseResult r = parse_config(text);
  REQUIRE(r.errors.empty());
  const std::string once = format_config(*r.config);
  const ParseResult again = parse_config(once);
  REQUIRE(again.errors.empty());
  CHECK(format_config(*again.config) == once);
  CHECK(again.config->potentials.size() == 2);
  CHECK(again.config->potentials[1].params.at("w0") == Complex(0.1, 0.2));
}

TEST_CASE("scaled multiplies n and divides dt") {
  const ScenarioConfig c = *parse_config(minimal).config;
  const ScenarioConfig s = scaled(c, 2);
  CHECK(s.grid.n == 64);
  CHECK(s.evolve.dt == 0.005);
  CHECK(s.resolution_scale == 2);
  CHECK_THROWS_AS(scaled(c, 0), ConfigError);
}

TEST_CASE("run and write outputs") {
  ScenarioConfig c = *parse_config(std::string(minimal) + "[checks]\nsuites = norm\n").config;
  const ScenarioResult r = run_scenario(c);
  CHECK(r.report["norm"]["max_drift"].get<double>() < 1e-10);
  CHECK(r.meta["resolution"]["n"] == 32);
  const auto dir = std::filesystem::temp_directory_path() / "qqm-unit-scenario";
  std::filesystem::remove_all(dir);
  write_outputs(r, c, dir);
  CHECK(std::filesystem::exists(dir / "series.csv"));
  CHECK(std::filesystem::exists(dir / "report.json"));
  CHECK(std::filesystem::exists(dir / "meta.json"));
  std::ifstream csv(dir / "series.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header.rfind("t,norm", 0) == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("load_config throws with every error") {
  const auto p = std::filesystem::temp_directory_path() / "qqm-unit-bad.ini";
  std::ofstream(p) << "equation = up\n[grid]\nn = 2\n";
  try {
    load_config(p);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    CHECK(what.find("line 1") != std::string::npos);
    CHECK(what.find("line 3") != std::string::npos);
  }
  std::filesystem::remove(p);
}

TEST_CASE("fields format exports the last recorded state") {
  ScenarioConfig c = *parse_config(std::string(minimal) + "[output]\nformats = csv, fields\n").config;
  const ScenarioResult r = run_scenario(c);
  std::istringstream in(r.field_table);
  std::string line;
  std::getline(in, line);
  CHECK(line == "index,ix,iy,iz,x,y,z,x0,x1,x2,x3");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 32);
  CHECK(r.field_table.find("\n0,0,0,0,-4,0,0,") != std::string::npos);
  const auto dir = std::filesystem::temp_directory_path() / "qqm-unit-fields";
  std::filesystem::remove_all(dir);
  write_outputs(r, c, dir);
  CHECK(std::filesystem::exists(dir / "field_final.csv"));
  CHECK_FALSE(std::filesystem::exists(dir / "report.json"));
  std::filesystem::remove_all(dir);
}
