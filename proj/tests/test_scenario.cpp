#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fsi/scenario.hpp"

using namespace fsi;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args)
{
  const std::string cmd = std::string(FSI_DLM_EXE) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t count_lines(const fs::path& p)
{
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

fs::path scratch_dir(const std::string& name)
{
  const fs::path dir = fs::temp_directory_path() / ("fsi_dlm_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const char* tiny_config = R"([scenario]
name = annulus_convergence
[fluid]
M = 4
[solid]
n_r = 2
n_theta = 4
[time]
scheme = bdf2
dt = 0.05
T = 0.1
mode = semi
[output]
snapshots = 0 0.1
)";

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("builtin scenarios")
{
  const Scenario a = builtin_scenario("annulus_convergence");
  CHECK(a.M == 8);
  CHECK(a.physics.nu == 1);
  CHECK(a.physics.kappa == 10);
  CHECK(a.T == 0.2);
  CHECK(a.boundary.bottom == WallKind::slip);
  const Scenario s = builtin_scenario("annulus_show");
  CHECK(s.physics.nu == 0.1);
  CHECK(s.T == 1.0);
  const RunConfig f = builtin_config("floating_disk");
  CHECK(f.scenario.M == 32);
  CHECK(f.scenario.physics.nu == 0.01);
  CHECK(f.scenario.physics.kappa == 0.1);
  CHECK(f.scenario.boundary.top == WallKind::lid);
  CHECK(f.scheme.dt == 0.01);
  CHECK(f.scheme.steps() == 400);
  CHECK_THROWS_AS(builtin_scenario("nope"), std::invalid_argument);
}

TEST_CASE("emitted config parses back to the same run")
{
  for (const char* name : {"annulus_convergence", "annulus_show", "floating_disk"}) {
    CAPTURE(name);
    RunConfig c = builtin_config(name);
    c.scenario.physics.rho_s = 0.1 + 0.2;
    c.scheme.mode.tolerance = 1.0 / 3.0 * 1e-6;
    std::stringstream ss;
    emit_config(ss, c);
    CHECK(parse_config(ss) == c);
  }
}

TEST_CASE("shipped configs equal the builtins")
{
  for (const char* name : {"annulus_convergence", "annulus_show", "floating_disk"}) {
    CAPTURE(name);
    CHECK(load_config(std::string(FSI_CONFIG_DIR) + "/" + name + ".ini") == builtin_config(name));
  }
}

TEST_CASE("config errors are reported as invalid arguments")
{
  auto parse = [](const std::string& text) {
    std::istringstream is(text);
    return parse_config(is);
  };
  CHECK_THROWS_AS(parse("[bogus]\nx = 1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse("[fluid]\nunknown = 1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse("[fluid]\nM = eight\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse("[time]\ndt = 0.03\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse("[time]\nscheme = rk4\n"), std::invalid_argument);
  CHECK(parse("[fluid]\nM = 4\n").scenario.M == 4);
}

TEST_CASE("dof table of the convergence meshes")
{
  RunConfig c = builtin_config("annulus_convergence");
  c.convergence.meshes = {8, 16};
  const DofTable t8 = dof_table(c.scenario);
  CHECK(t8.velocity == 578);
  CHECK(t8.pressure == 209);
  CHECK(t8.solid == 306);
  CHECK(t8.multiplier == 306);
  std::ostringstream os;
  CHECK(cmd_dry_run(c, os) == 0);
  const std::string out = os.str();
  CHECK(out.find("578") != std::string::npos);
  CHECK(out.find("2178") != std::string::npos);
  CHECK(out.find("801") != std::string::npos);
  CHECK(out.find("1122") != std::string::npos);
  CHECK(out.find("steps 4") != std::string::npos);
}

TEST_CASE("command line: missing config, bad config and a tiny run")
{
  const fs::path dir = scratch_dir("cli");
  CHECK(run_cli("dry-run --config " + (dir / "missing.ini").string()) == 2);
  CHECK(run_cli("") != 0);

  std::ofstream(dir / "bad.ini") << "[fluid]\nM = -1\n";
  CHECK(run_cli("run --config " + (dir / "bad.ini").string() + " --out " + (dir / "bad").string()) == 1);
  CHECK(fs::exists(dir / "bad" / "error.json"));

  std::ofstream(dir / "tiny.ini") << tiny_config;
  CHECK(run_cli("dry-run --config " + (dir / "tiny.ini").string()) == 0);
  CHECK(run_cli("run --config " + (dir / "tiny.ini").string() + " --out " + (dir / "run").string()) == 0);
  CHECK(count_lines(dir / "run" / "diagnostics.csv") == 4);
  CHECK(count_lines(dir / "run" / "solver.jsonl") == 2);
  CHECK(fs::exists(dir / "run" / "fluid_0.vtk"));
  CHECK(fs::exists(dir / "run" / "fluid_2.vtk"));

  const std::string cmd = "OUTPUT_DIR=" + (dir / "env").string() + " " + FSI_DLM_EXE + " run --config " +
                          (dir / "tiny.ini").string() + " --scheme be > /dev/null 2>&1";
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(count_lines(dir / "env" / "diagnostics.csv") == 4);
  fs::remove_all(dir);
}

}
