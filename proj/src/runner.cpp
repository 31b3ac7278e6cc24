#include "fcvi/runner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace fcvi {

namespace fs = std::filesystem;
using nlohmann::json;

std::string round_report_json(const RoundReport& rep) {
  json j;
  j["round"] = rep.round;
  j["k"] = rep.k;
  j["active_clients"] = rep.active_clients;
  j["carry_forward"] = rep.carry_forward_classes;
  j["metrics"] = {{"accuracy", rep.metrics.accuracy},
                  {"macro_precision", rep.metrics.macro_precision},
                  {"macro_recall", rep.metrics.macro_recall},
                  {"macro_f1", rep.metrics.macro_f1}};
  if (rep.monitor) {
    json m;
    json ratios = json::array();
    json cases = json::array();
    for (std::size_t l = 0; l < rep.monitor->ratios.size(); ++l) {
      if (rep.monitor->ratios[l].is_new) ratios.push_back(nullptr);
      else ratios.push_back(rep.monitor->ratios[l].value);
      cases.push_back(to_string(rep.monitor->cases[l]));
    }
    m["R"] = ratios;
    m["cases"] = cases;
    m["r_min"] = rep.monitor->r_min;
    m["mu"] = rep.monitor->mu;
    j["monitor"] = m;
  }
  if (rep.monitor_inconclusive) j["monitor_inconclusive"] = true;
  if (!rep.selftrain.empty()) {
    json st;
    for (const auto& [id, diag] : rep.selftrain) {
      st[std::to_string(id)] = {{"kept_per_class", diag.kept_per_class}};
    }
    j["selftrain"] = st;
  }
  return j.dump();
}

namespace {

constexpr const char* kCurvesHeader =
    "round,mode,seed,accuracy,macro_precision,macro_recall,macro_f1";

std::vector<std::size_t> summary_rounds(const ScenarioSchedule& s) {
  std::vector<std::size_t> rounds = s.change_rounds();
  if (rounds.empty() || rounds.back() != s.total_rounds)
    rounds.push_back(s.total_rounds);
  return rounds;
}

struct MeanStd {
  double mean = 0.0, std = 0.0;
};

MeanStd mean_std(const std::vector<double>& v) {
  MeanStd ms;
  if (v.empty()) return ms;
  for (double x : v) ms.mean += x;
  ms.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double acc = 0.0;
    for (double x : v) acc += (x - ms.mean) * (x - ms.mean);
    ms.std = std::sqrt(acc / static_cast<double>(v.size() - 1));
  }
  return ms;
}

}  // namespace

int run_command(const RunConfig& rc) {
  ParsedConfig cfg;
  try {
    cfg = parse_config_file(rc.scenario_path);
    if (!rc.modes.empty()) cfg.modes = rc.modes;
    if (!rc.seeds.empty()) cfg.seeds = rc.seeds;
    if (rc.monitor_every_round) cfg.schedule.monitor_every_round = true;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    fs::create_directories(rc.out_dir);
    {
      std::ofstream resolved(rc.out_dir / "resolved_config.cfg");
      resolved << render_config(cfg);
    }

    // mode name -> seed -> per-round metrics
    std::map<std::string, std::map<std::uint64_t, std::vector<MetricsRecord>>> all;

    std::ostringstream curves;
    curves << kCurvesHeader << "\n";

    for (Mode mode : cfg.modes) {
      const fs::path mode_dir = rc.out_dir / "runs" / to_string(mode);
      fs::create_directories(mode_dir);
      for (std::uint64_t seed : cfg.seeds) {
        if (rc.verbose)
          std::cerr << "running " << to_string(mode) << " seed " << seed << "\n";
        const auto reports = run_scenario(cfg.schedule, mode, seed);

        std::ofstream jl(mode_dir / (std::to_string(seed) + ".jsonl"));
        auto& per_round = all[to_string(mode)][seed];
        for (const auto& rep : reports) {
          jl << round_report_json(rep) << "\n";
          per_round.push_back(rep.metrics);
          curves << rep.round << "," << to_string(mode) << "," << seed << ","
                 << format_double(rep.metrics.accuracy) << ","
                 << format_double(rep.metrics.macro_precision) << ","
                 << format_double(rep.metrics.macro_recall) << ","
                 << format_double(rep.metrics.macro_f1) << "\n";
        }
        jl << json{{"done", true}, {"rounds", reports.size()}}.dump() << "\n";
      }
    }

    {
      std::ofstream cf(rc.out_dir / "curves.csv");
      cf << curves.str();
    }

    {
      std::ofstream sf(rc.out_dir / "summary.csv");
      sf << "mode,round,accuracy_mean,accuracy_std,macro_precision_mean,"
            "macro_precision_std,macro_recall_mean,macro_recall_std,"
            "macro_f1_mean,macro_f1_std\n";
      const auto rounds = summary_rounds(cfg.schedule);
      for (Mode mode : cfg.modes) {
        const auto& by_seed = all[to_string(mode)];
        for (std::size_t r : rounds) {
          std::vector<double> acc, mp, mr, mf;
          for (const auto& [seed, recs] : by_seed) {
            acc.push_back(recs[r - 1].accuracy);
            mp.push_back(recs[r - 1].macro_precision);
            mr.push_back(recs[r - 1].macro_recall);
            mf.push_back(recs[r - 1].macro_f1);
          }
          const auto a = mean_std(acc), p = mean_std(mp), rr = mean_std(mr),
                     f = mean_std(mf);
          sf << to_string(mode) << "," << r << "," << format_double(a.mean)
             << "," << format_double(a.std) << "," << format_double(p.mean)
             << "," << format_double(p.std) << "," << format_double(rr.mean)
             << "," << format_double(rr.std) << "," << format_double(f.mean)
             << "," << format_double(f.std) << "\n";
        }
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

namespace {

struct CurveKey {
  std::string mode;
  std::uint64_t seed;
  std::size_t round;
};

}  // namespace

int report_command(const fs::path& run_dir) {
  const fs::path cfg_path = run_dir / "resolved_config.cfg";
  if (!fs::exists(cfg_path)) {
    std::cerr << "error: missing file " << cfg_path.string() << "\n";
    return 1;
  }
  ParsedConfig cfg;
  try {
    cfg = parse_config_file(cfg_path);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  // Completion check: every run file present with a terminal done record.
  for (Mode mode : cfg.modes) {
    for (std::uint64_t seed : cfg.seeds) {
      const fs::path f =
          run_dir / "runs" / to_string(mode) / (std::to_string(seed) + ".jsonl");
      if (!fs::exists(f)) {
        std::cerr << "error: missing file " << f.string() << "\n";
        return 1;
      }
      std::ifstream in(f);
      std::string line, last;
      while (std::getline(in, line)) {
        if (!line.empty()) last = line;
      }
      if (last.find("\"done\":true") == std::string::npos) {
        std::cerr << "error: incomplete run (no done record): " << f.string()
                  << "\n";
        return 1;
      }
    }
  }

  const fs::path curves_path = run_dir / "curves.csv";
  if (!fs::exists(curves_path)) {
    std::cerr << "error: missing file " << curves_path.string() << "\n";
    return 1;
  }

  // mode -> round -> metric values over seeds; metrics indexed 0..3.
  std::map<std::string, std::map<std::size_t, std::array<std::vector<double>, 4>>>
      table;
  {
    std::ifstream in(curves_path);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::stringstream ss(line);
      std::string field;
      std::vector<std::string> fields;
      while (std::getline(ss, field, ',')) fields.push_back(field);
      if (fields.size() != 7) continue;
      const std::size_t round = std::stoull(fields[0]);
      auto& cell = table[fields[1]][round];
      for (int m = 0; m < 4; ++m) cell[m].push_back(std::stod(fields[3 + m]));
    }
  }

  static const char* kMetricNames[4] = {"accuracy", "macro_precision",
                                        "macro_recall", "macro_f1"};
  const auto& rounds = cfg.schedule.sample_rounds;

  std::vector<std::string> mode_names;
  for (Mode m : cfg.modes) mode_names.push_back(to_string(m));
  const bool have_fcvi =
      std::find(mode_names.begin(), mode_names.end(), "fcvi") != mode_names.end();

  std::cout << "scenario: " << cfg.schedule.name << "   seeds: " << cfg.seeds.size()
            << "   rounds sampled:";
  for (std::size_t r : rounds) std::cout << " " << r;
  std::cout << "\n";

  for (int m = 0; m < 4; ++m) {
    std::cout << "\n== " << kMetricNames[m] << " (seed means) ==\n";
    std::cout << std::left << std::setw(28) << "mode";
    for (std::size_t r : rounds) std::cout << std::right << std::setw(9) << r;
    std::cout << "\n";

    std::map<std::string, std::vector<double>> means;
    for (const auto& name : mode_names) {
      std::cout << std::left << std::setw(28) << name;
      for (std::size_t r : rounds) {
        const auto ms = mean_std(table[name][r][m]);
        means[name].push_back(ms.mean);
        std::cout << std::right << std::setw(9) << std::fixed
                  << std::setprecision(4) << ms.mean;
      }
      std::cout << "\n";
    }
    if (have_fcvi && mode_names.size() > 1) {
      for (const auto& name : mode_names) {
        if (name == "fcvi") continue;
        std::cout << std::left << std::setw(28) << ("delta_vs_" + name);
        for (std::size_t i = 0; i < rounds.size(); ++i) {
          std::cout << std::right << std::setw(9) << std::showpos << std::fixed
                    << std::setprecision(4)
                    << means["fcvi"][i] - means[name][i] << std::noshowpos;
        }
        std::cout << "\n";
      }
    }
  }
  return 0;
}

int validate_command(const fs::path& scenario_path) {
  try {
    const ParsedConfig cfg = parse_config_file(scenario_path);
    std::cout << "ok: " << cfg.schedule.name << " (" << cfg.schedule.total_rounds
              << " rounds, " << cfg.schedule.num_classes << " classes, "
              << cfg.schedule.clients.size() << " clients)\n";
    std::cout << "change rounds:";
    for (std::size_t r : cfg.schedule.change_rounds()) std::cout << " " << r;
    std::cout << "\n";
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace fcvi
