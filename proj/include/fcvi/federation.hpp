#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fcvi/metrics.hpp"
#include "fcvi/monitor.hpp"
#include "fcvi/scenario.hpp"
#include "fcvi/selftrain.hpp"

namespace fcvi {

enum class Mode { Fcvi, FedavgSupervised, FedavgSelftrainUniform };

const char* to_string(Mode m);
Mode mode_from_string(const std::string& s);

// Weighted elementwise sum; weights must be nonnegative and sum to 1.
ModelParams aggregate(const std::vector<ModelParams>& params_list,
                      const std::vector<double>& weights);

// Output rows of vanished classes are taken bitwise from theta_old; the rest
// of theta_new is untouched.
ModelParams carry_forward(const ModelParams& theta_new,
                          const ModelParams& theta_old,
                          const std::vector<std::size_t>& vanished);

struct ServerState {
  ModelParams theta_current;           // last broadcast aggregate
  std::vector<ClassDelta> last_deltas; // aggregate minus broadcast, prev round
  bool have_last_deltas = false;
  std::size_t k_prev = 0;
  std::optional<std::vector<double>> mu_current;  // broadcast alongside theta
  std::size_t round = 0;
};

struct RoundReport {
  std::size_t round = 0;
  std::vector<int> active_clients;
  std::size_t k = 0;
  ModelParams aggregated;  // post carry-forward
  std::optional<ChangeRatioReport> monitor;
  bool monitor_inconclusive = false;
  std::vector<std::size_t> carry_forward_classes;
  MetricsRecord metrics;
  std::map<int, SelfTrainDiagnostics> selftrain;
  double wall_time_seconds = 0.0;  // never serialized
};

struct ScenarioData {
  std::map<int, ClientDataset> clients;
  LabeledSet test_set;  // balanced, covers every class
  ModelParams initial_params;
};

ScenarioData build_scenario_data(const ScenarioSchedule& schedule,
                                 std::uint64_t seed);

std::vector<double> aggregation_weights(const ScenarioSchedule& schedule,
                                        const ScenarioData& data,
                                        const std::vector<int>& active);

RoundReport run_round(ServerState& server, const ScenarioSchedule& schedule,
                      const ScenarioData& data, Mode mode, std::uint64_t seed,
                      std::size_t t);

std::vector<RoundReport> run_scenario(const ScenarioSchedule& schedule,
                                      Mode mode, std::uint64_t seed);

}  // namespace fcvi
