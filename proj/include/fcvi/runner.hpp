#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fcvi/config.hpp"
#include "fcvi/federation.hpp"

namespace fcvi {

struct RunConfig {
  std::filesystem::path scenario_path;
  std::vector<Mode> modes;           // empty: take from config
  std::vector<std::uint64_t> seeds;  // empty: take from config
  std::filesystem::path out_dir = "out";
  bool monitor_every_round = false;
  bool verbose = false;
};

// One RoundReport as a JSONL line.
std::string round_report_json(const RoundReport& rep);

// Executes every (mode, seed), writing runs/<mode>/<seed>.jsonl, curves.csv,
// summary.csv and the resolved config dump. Exit code 0/1/2 per contract.
int run_command(const RunConfig& rc);

int report_command(const std::filesystem::path& run_dir);

int validate_command(const std::filesystem::path& scenario_path);

}  // namespace fcvi
