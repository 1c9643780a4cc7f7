#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>

#include <CLI11.hpp>
#include <json.hpp>

#include "fsi/coupling.hpp"
#include "fsi/scenario.hpp"

namespace {

std::string error_kind(const std::exception& e)
{
  if (dynamic_cast<const fsi::SolidEscaped*>(&e)) return "solid_escaped";
  if (dynamic_cast<const fsi::PicardDiverged*>(&e)) return "picard_diverged";
  if (dynamic_cast<const fsi::SingularSystem*>(&e)) return "singular_system";
  if (dynamic_cast<const std::invalid_argument*>(&e)) return "invalid_config";
  return "runtime_error";
}

void report(const std::exception& e, const std::string& out_dir)
{
  nlohmann::ordered_json j;
  j["error"] = error_kind(e);
  j["message"] = e.what();
  if (const auto* p = dynamic_cast<const fsi::PicardDiverged*>(&e)) j["residuals"] = p->residuals;
  std::cerr << j.dump() << '\n';
  if (out_dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  std::ofstream(std::filesystem::path(out_dir) / "error.json") << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Fictitious-domain fluid-structure solver"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::string> scheme;
  std::optional<std::string> mode;
  std::optional<double> dt;
  const std::pair<const char*, const char*> commands[] = {
      {"run", "Time-step one scenario and write diagnostics and snapshots"},
      {"convergence", "Time-step convergence study against a fine reference"},
      {"volume", "Solid volume drift for each scheme and the coarse mesh"},
      {"dry-run", "Print problem sizes without solving"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Config file (INI)")->required();
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--scheme", scheme, "be | bdf2 | cnm | cnt");
    sub->add_option("--mode", mode, "picard | semi");
    sub->add_option("--dt", dt, "Time step");
  }
  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  if (!std::filesystem::exists(config_path)) {
    std::cerr << "config file not found: " << config_path << '\n';
    return 2;
  }
  std::string dir = out_dir.value_or("");
  try {
    fsi::RunConfig c = fsi::load_config(config_path);
    if (out_dir) c.output_dir = *out_dir;
    if (scheme) c.scheme.scheme = fsi::scheme_from_string(*scheme);
    if (mode) c.scheme.mode.kind = fsi::mode_from_string(*mode);
    if (dt) c.scheme.dt = *dt;
    c.validate();
    dir = c.output_dir;
    if (command == "run") return fsi::cmd_run(c);
    if (command == "convergence") return fsi::cmd_convergence(c);
    if (command == "volume") return fsi::cmd_volume(c);
    return fsi::cmd_dry_run(c, std::cout);
  } catch (const std::exception& e) {
    report(e, command == "dry-run" ? "" : dir);
    return 1;
  }
}
