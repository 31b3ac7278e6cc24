#pragma once

#include <string>
#include <vector>

#include "fcvi/dataset.hpp"
#include "fcvi/nn.hpp"
#include "fcvi/selftrain.hpp"

namespace fcvi {

enum class AggregationMode { Uniform, ProportionalToLabeledSize };

struct ClientSpec {
  int id = 0;
  std::size_t join_round = 1;
  std::size_t leave_round = 0;  // exclusive; T+1 means "stays"
  // Per-class sample counts for the two local pools. The config parser can
  // fill these from a `counts` total plus the global label fraction beta.
  std::vector<std::size_t> labeled_counts;
  std::vector<std::size_t> unlabeled_counts;
};

// Scripted churn schedule plus all per-run configuration.
struct ScenarioSchedule {
  std::string name = "scenario";
  std::size_t total_rounds = 60;
  std::size_t num_classes = 5;
  std::size_t feature_dim = 16;
  std::size_t hidden_units = 32;
  double sigma = 1.0;
  double mean_scale = 6.0;
  double beta = 0.3;
  std::size_t test_per_class = 100;

  TrainConfig train;

  double eps_zero = 0.05;
  double eps_steady = 0.05;
  double eps_denominator_scale = 1e-9;
  bool monitor_every_round = false;

  SelfTrainConfig selftrain;
  AggregationMode aggregation = AggregationMode::Uniform;

  std::vector<std::size_t> sample_rounds;  // report rows; defaults to
                                           // change rounds plus the final round
  std::vector<ClientSpec> clients;

  void validate() const;
  GaussianSpec gaussian_spec() const;
  // Rounds t >= 2 whose active-client count differs from round t-1.
  std::vector<std::size_t> change_rounds() const;
  std::vector<std::size_t> default_sample_rounds() const;
};

// Clients with join_round <= t < leave_round, ordered by id.
std::vector<int> active_clients(const ScenarioSchedule& schedule, std::size_t t);

// Ground-truth labeled class counts over active clients. Evaluation and test
// oracle only; the protocol never reads this.
std::vector<std::size_t> true_class_counts(const ScenarioSchedule& schedule,
                                           std::size_t t);

}  // namespace fcvi
