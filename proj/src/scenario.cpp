#include "fcvi/scenario.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace fcvi {

void ScenarioSchedule::validate() const {
  if (total_rounds < 1) throw std::invalid_argument("scenario.rounds: must be >= 1");
  if (num_classes < 2) throw std::invalid_argument("scenario.classes: must be >= 2");
  if (feature_dim < 1) throw std::invalid_argument("scenario.feature_dim: must be >= 1");
  if (hidden_units < 1) throw std::invalid_argument("scenario.hidden_units: must be >= 1");
  if (num_classes > feature_dim)
    throw std::invalid_argument("scenario.classes: must be <= feature_dim for axis-aligned means");
  if (!(sigma > 0.0)) throw std::invalid_argument("scenario.sigma: must be > 0");
  if (beta < 0.0 || beta > 1.0) throw std::invalid_argument("scenario.beta: must be in [0,1]");
  train.validate();
  selftrain.validate();
  if (!(eps_zero < 1.0 - eps_steady))
    throw std::invalid_argument("monitor.eps_zero: need eps_zero < 1 - eps_steady");
  if (!(eps_denominator_scale > 0.0))
    throw std::invalid_argument("monitor.eps_denominator_scale: must be > 0");
  if (test_per_class < 1) throw std::invalid_argument("scenario.test_per_class: must be >= 1");

  if (clients.empty()) throw std::invalid_argument("client: at least one client required");
  std::set<int> ids;
  for (const auto& c : clients) {
    if (!ids.insert(c.id).second)
      throw std::invalid_argument("client.id: duplicate client id " + std::to_string(c.id));
    if (c.join_round < 1) throw std::invalid_argument("client.join: must be >= 1");
    if (!(c.join_round < c.leave_round))
      throw std::invalid_argument("client.leave: need join < leave for client " + std::to_string(c.id));
    if (c.leave_round > total_rounds + 1)
      throw std::invalid_argument("client.leave: must be <= rounds+1 for client " + std::to_string(c.id));
    if (c.labeled_counts.size() != num_classes || c.unlabeled_counts.size() != num_classes)
      throw std::invalid_argument("client.counts: need one count per class for client " + std::to_string(c.id));
  }
  for (std::size_t t = 1; t <= total_rounds; ++t) {
    if (active_clients(*this, t).empty())
      throw std::invalid_argument("client: no active client at round " + std::to_string(t));
  }
  for (std::size_t r : sample_rounds) {
    if (r < 1 || r > total_rounds)
      throw std::invalid_argument("report.sample_rounds: round " + std::to_string(r) + " out of range");
  }
}

GaussianSpec ScenarioSchedule::gaussian_spec() const {
  return simplex_spec(num_classes, feature_dim, mean_scale, sigma);
}

std::vector<std::size_t> ScenarioSchedule::change_rounds() const {
  std::vector<std::size_t> out;
  std::size_t k_prev = active_clients(*this, 1).size();
  for (std::size_t t = 2; t <= total_rounds; ++t) {
    const std::size_t k = active_clients(*this, t).size();
    if (k != k_prev) out.push_back(t);
    k_prev = k;
  }
  return out;
}

std::vector<std::size_t> ScenarioSchedule::default_sample_rounds() const {
  std::vector<std::size_t> out = change_rounds();
  if (out.empty() || out.back() != total_rounds) out.push_back(total_rounds);
  return out;
}

std::vector<int> active_clients(const ScenarioSchedule& schedule, std::size_t t) {
  if (t < 1 || t > schedule.total_rounds)
    throw std::invalid_argument("active_clients: round out of range");
  std::vector<int> out;
  for (const auto& c : schedule.clients) {
    if (c.join_round <= t && t < c.leave_round) out.push_back(c.id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> true_class_counts(const ScenarioSchedule& schedule,
                                           std::size_t t) {
  const auto active = active_clients(schedule, t);
  std::vector<std::size_t> counts(schedule.num_classes, 0);
  for (const auto& c : schedule.clients) {
    if (std::find(active.begin(), active.end(), c.id) == active.end()) continue;
    for (std::size_t l = 0; l < counts.size(); ++l) counts[l] += c.labeled_counts[l];
  }
  return counts;
}

}  // namespace fcvi
