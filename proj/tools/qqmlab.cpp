// qqmlab: run scenario files and the operator-identity suite.
//
//   qqmlab run --config ho_ground_right --out out/ho
//   qqmlab check-identities [--config FILE] [--flip-kappa]
//   qqmlab list-scenarios
//   qqmlab print-config --config FILE

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "qqm/diagnostics.hpp"
#include "qqm/errors.hpp"
#include "qqm/identities.hpp"
#include "qqm/scenario.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scenario_dir() {
  if (const char* env = std::getenv("QQM_SCENARIO_DIR")) return env;
  return QQM_SCENARIO_DIR;
}

/// A path, or the name of a bundled scenario.
fs::path resolve(const std::string& arg) {
  if (fs::exists(arg)) return arg;
  const fs::path bundled = scenario_dir() / (arg + ".ini");
  if (fs::exists(bundled)) return bundled;
  return arg;  // let load_config report it
}

int cmd_run(const std::string& config, const std::string& out, bool dry_run, int scale) {
  qqm::ScenarioConfig cfg = qqm::scaled(qqm::load_config(resolve(config)), scale);
  if (dry_run) {
    std::cout << qqm::format_config(cfg);
    return 0;
  }
  const fs::path dir = out.empty() ? fs::path(cfg.output.directory) : fs::path(out);
  const qqm::ScenarioResult res = qqm::run_scenario(cfg);
  qqm::write_outputs(res, cfg, dir);
  std::cout << "wrote " << dir.string() << " (" << res.series.times.size() << " records)\n";
  return 0;
}

int cmd_identities(const std::string& config, int scale, bool flip, const std::string& out) {
  qqm::IdentityOptions opts;
  if (!config.empty()) {
    const qqm::ScenarioConfig cfg = qqm::load_config(resolve(config));
    opts.dims = cfg.grid.dims;
    opts.units = cfg.units;
    if (cfg.grid.dims == 1) {
      opts.n1d = cfg.grid.n;
      opts.length1d = cfg.grid.length;
    } else if (cfg.grid.dims == 3) {
      opts.n3d = cfg.grid.n;
      opts.length3d = cfg.grid.length;
    }
  }
  opts.n1d *= scale;
  opts.n3d *= scale;
  opts.flip_kappa = flip;
  const auto results = qqm::check_identities(opts);

  nlohmann::ordered_json table = nlohmann::ordered_json::array();
  bool ok = true;
  std::printf("%-26s %-22s %-8s %-12s %-12s %s\n", "identity", "gauge", "status", "coarse", "fine", "order");
  for (const auto& r : results) {
    std::printf("%-26s %-22s %-8s %-12.4e %-12.4e %.3f\n", r.name.c_str(), r.gauge.c_str(), r.status.c_str(),
                r.coarse, r.fine, r.order);
    ok = ok && r.status != "fail";
    table.push_back({{"identity", r.name}, {"gauge", r.gauge}, {"status", r.status}, {"coarse", r.coarse},
                     {"fine", r.fine}, {"order", r.order}, {"scale", r.scale}});
  }
  if (!out.empty()) {
    fs::create_directories(out);
    std::FILE* f = std::fopen((fs::path(out) / "identities.json").c_str(), "wb");
    if (!f) throw fs::filesystem_error("cannot open for writing", fs::path(out) / "identities.json",
                                       std::error_code(errno, std::generic_category()));
    const std::string body = table.dump(2) + "\n";
    std::fwrite(body.data(), 1, body.size(), f);
    std::fclose(f);
  }
  return ok ? 0 : 1;
}

int cmd_list() {
  std::vector<fs::path> files;
  if (fs::is_directory(scenario_dir()))
    for (const auto& e : fs::directory_iterator(scenario_dir()))
      if (e.path().extension() == ".ini") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& p : files) std::cout << p.stem().string() << "\t" << p.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quaternionic wave-equation lab"};
  app.require_subcommand(1);
  std::string config, out;
  bool dry_run = false, flip = false;
  int scale = 1;

  auto* run = app.add_subcommand("run", "evolve a scenario and write series.csv, report.json, meta.json");
  run->add_option("--config", config, "scenario file or bundled scenario name")->required();
  run->add_option("--out", out, "output directory (default: output.directory)");
  run->add_flag("--dry-run", dry_run, "validate and print the resolved config, write nothing");
  run->add_option("--resolution-scale", scale, "multiply n and divide dt")->check(CLI::PositiveNumber);

  auto* ids = app.add_subcommand("check-identities", "operator identities at two resolutions");
  ids->add_option("--config", config, "take dims, n, length and units from a scenario");
  ids->add_option("--resolution-scale", scale, "multiply the coarse n")->check(CLI::PositiveNumber);
  ids->add_option("--out", out, "also write identities.json here");
  ids->add_flag("--flip-kappa", flip, "debug mutation: negate kappa in B");

  auto* list = app.add_subcommand("list-scenarios", "bundled scenario files");
  auto* print = app.add_subcommand("print-config", "print the resolved config");
  print->add_option("--config", config, "scenario file or bundled scenario name")->required();
  print->add_option("--resolution-scale", scale, "multiply n and divide dt")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config, out, dry_run, scale);
    if (*ids) return cmd_identities(config, scale, flip, out);
    if (*list) return cmd_list();
    if (*print) {
      std::cout << qqm::format_config(qqm::scaled(qqm::load_config(resolve(config)), scale));
      return 0;
    }
  } catch (const qqm::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const qqm::DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const qqm::PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  }
  return 0;
}
