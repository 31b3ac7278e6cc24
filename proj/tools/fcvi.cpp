#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fcvi/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"FCVI federated semi-supervised learning simulator"};
  app.require_subcommand(1);

  fcvi::RunConfig rc;
  std::vector<std::string> mode_names;
  std::string scenario, out_dir = "out", report_dir;

  auto* run = app.add_subcommand("run", "execute a scenario across modes and seeds");
  run->add_option("config", scenario, "scenario config file")->required();
  run->add_option("--modes", mode_names, "modes to run (fcvi, fedavg_supervised, fedavg_selftrain_uniform)")
      ->delimiter(',');
  run->add_option("--seeds", rc.seeds, "seeds to run")->delimiter(',');
  run->add_option("--out", out_dir, "output directory");
  run->add_flag("--monitor-every-round", rc.monitor_every_round,
                "log a diagnostic monitor report every round");
  run->add_flag("--verbose", rc.verbose, "progress output on stderr");

  auto* report = app.add_subcommand("report", "summarize a completed run directory");
  report->add_option("dir", report_dir, "run output directory")->required();

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "check a scenario config");
  validate->add_option("config", validate_path, "scenario config file")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    rc.scenario_path = scenario;
    rc.out_dir = out_dir;
    try {
      for (const auto& name : mode_names)
        rc.modes.push_back(fcvi::mode_from_string(name));
    } catch (const std::invalid_argument& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
    return fcvi::run_command(rc);
  }
  if (report->parsed()) return fcvi::report_command(report_dir);
  return fcvi::validate_command(validate_path);
}
