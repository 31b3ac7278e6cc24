#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "fcvi/federation.hpp"
#include "fcvi/scenario.hpp"

namespace fcvi {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A scenario file plus its [run] defaults, fully resolved.
struct ParsedConfig {
  ScenarioSchedule schedule;
  std::vector<Mode> modes{Mode::Fcvi, Mode::FedavgSupervised};
  std::vector<std::uint64_t> seeds{1};
};

ParsedConfig parse_config_text(const std::string& text,
                               const std::string& source_name);
ParsedConfig parse_config_file(const std::filesystem::path& path);

// Resolved key/value dump; parsing it back reproduces the same configuration.
std::string render_config(const ParsedConfig& cfg);

// Shortest round-trip decimal representation.
std::string format_double(double x);

}  // namespace fcvi
