#include "fcvi/federation.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fcvi/rng.hpp"

namespace fcvi {

const char* to_string(Mode m) {
  switch (m) {
    case Mode::Fcvi: return "fcvi";
    case Mode::FedavgSupervised: return "fedavg_supervised";
    case Mode::FedavgSelftrainUniform: return "fedavg_selftrain_uniform";
  }
  return "?";
}

Mode mode_from_string(const std::string& s) {
  if (s == "fcvi") return Mode::Fcvi;
  if (s == "fedavg_supervised") return Mode::FedavgSupervised;
  if (s == "fedavg_selftrain_uniform") return Mode::FedavgSelftrainUniform;
  throw std::invalid_argument("unknown mode '" + s + "'");
}

ModelParams aggregate(const std::vector<ModelParams>& params_list,
                      const std::vector<double>& weights) {
  if (params_list.empty()) throw std::invalid_argument("aggregate: empty client list");
  if (weights.size() != params_list.size())
    throw std::invalid_argument("aggregate: weight count mismatch");
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("aggregate: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("aggregate: weights must sum to 1");
  for (const auto& p : params_list) {
    if (!p.same_shape(params_list.front()))
      throw std::invalid_argument("aggregate: parameter shape mismatch");
  }

  ModelParams out = ModelParams::zeros(params_list[0].input_dim(),
                                       params_list[0].hidden_units(),
                                       params_list[0].num_classes());
  for (std::size_t i = 0; i < params_list.size(); ++i) {
    const double w = weights[i];
    const ModelParams& p = params_list[i];
    for (std::size_t j = 0; j < out.hidden_weights.data.size(); ++j)
      out.hidden_weights.data[j] += w * p.hidden_weights.data[j];
    for (std::size_t j = 0; j < out.hidden_bias.size(); ++j)
      out.hidden_bias[j] += w * p.hidden_bias[j];
    for (std::size_t j = 0; j < out.output_weights.data.size(); ++j)
      out.output_weights.data[j] += w * p.output_weights.data[j];
    for (std::size_t j = 0; j < out.output_bias.size(); ++j)
      out.output_bias[j] += w * p.output_bias[j];
  }
  return out;
}

ModelParams carry_forward(const ModelParams& theta_new,
                          const ModelParams& theta_old,
                          const std::vector<std::size_t>& vanished) {
  if (!theta_new.same_shape(theta_old))
    throw std::invalid_argument("carry_forward: shape mismatch");
  ModelParams out = theta_new;
  for (std::size_t l : vanished) {
    if (l >= theta_new.num_classes())
      throw std::invalid_argument("carry_forward: class index out of range");
    out.set_output_row(l, theta_old.output_row(l));
  }
  return out;
}

ScenarioData build_scenario_data(const ScenarioSchedule& schedule,
                                 std::uint64_t seed) {
  const GaussianSpec gauss = schedule.gaussian_spec();

  ScenarioData data;
  for (const auto& c : schedule.clients) {
    const auto cid = static_cast<std::uint64_t>(static_cast<std::int64_t>(c.id));
    LabeledSet lab =
        generate_class_data(gauss, c.labeled_counts, mix_seed(seed, 0x11, cid));
    LabeledSet raw =
        generate_class_data(gauss, c.unlabeled_counts, mix_seed(seed, 0x22, cid));
    UnlabeledSet unlab{std::move(raw.features), std::move(raw.labels)};
    data.clients.emplace(c.id, ClientDataset{std::move(lab), std::move(unlab)});
  }

  const std::vector<std::size_t> test_counts(schedule.num_classes,
                                             schedule.test_per_class);
  data.test_set = generate_class_data(gauss, test_counts, mix_seed(seed, 0x33));
  data.initial_params =
      ModelParams::random_init(schedule.feature_dim, schedule.hidden_units,
                               schedule.num_classes, mix_seed(seed, 0x44));
  return data;
}

std::vector<double> aggregation_weights(const ScenarioSchedule& schedule,
                                        const ScenarioData& data,
                                        const std::vector<int>& active) {
  std::vector<double> w(active.size());
  if (schedule.aggregation == AggregationMode::Uniform) {
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(active.size()));
  } else {
    double total = 0.0;
    for (std::size_t i = 0; i < active.size(); ++i) {
      w[i] = static_cast<double>(data.clients.at(active[i]).labeled.size());
      total += w[i];
    }
    if (total <= 0.0) {
      std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(active.size()));
    } else {
      for (double& x : w) x /= total;
    }
  }
  // Exact unit sum for the aggregate precondition.
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= sum;
  return w;
}

RoundReport run_round(ServerState& server, const ScenarioSchedule& schedule,
                      const ScenarioData& data, Mode mode, std::uint64_t seed,
                      std::size_t t) {
  const auto start = std::chrono::steady_clock::now();

  RoundReport rep;
  rep.round = t;
  rep.active_clients = active_clients(schedule, t);
  rep.k = rep.active_clients.size();
  if (rep.k == 0) throw std::invalid_argument("run_round: no active clients");

  const ModelParams broadcast = server.theta_current;

  // (b) local computation, deterministic client-id order.
  std::vector<ModelParams> locals;
  locals.reserve(rep.k);
  for (int id : rep.active_clients) {
    const ClientDataset& cd = data.clients.at(id);
    TrainConfig tc = schedule.train;
    tc.rng_seed = mix_seed(seed, t, static_cast<std::uint64_t>(static_cast<std::int64_t>(id)));
    if (mode != Mode::FedavgSupervised && server.mu_current) {
      SelfTrainResult r =
          self_train(broadcast, cd, *server.mu_current, schedule.selftrain, tc);
      rep.selftrain.emplace(id, std::move(r.diagnostics));
      locals.push_back(std::move(r.params));
    } else {
      locals.push_back(train_local(broadcast, cd.labeled, tc));
    }
  }

  // (c) aggregate.
  const auto weights = aggregation_weights(schedule, data, rep.active_clients);
  ModelParams agg = aggregate(locals, weights);
  std::vector<ClassDelta> deltas = per_class_deltas(broadcast, agg);

  // (d) monitor on client-count change; round 1 has no baseline deltas.
  const bool k_changed = t >= 2 && rep.k != server.k_prev;
  std::optional<std::vector<double>> mu_next;

  if (mode == Mode::Fcvi) {
    const bool diagnostic = schedule.monitor_every_round && t >= 2;
    if ((k_changed || diagnostic) && server.have_last_deltas) {
      const MonitorThresholds th{
          schedule.eps_zero, schedule.eps_steady,
          schedule.eps_denominator_scale * (1.0 + inf_norm(broadcast))};
      try {
        ChangeRatioReport mrep =
            compute_report(server.last_deltas, deltas, server.k_prev, rep.k, th);
        if (k_changed) {
          rep.carry_forward_classes = mrep.vanished();
          agg = carry_forward(agg, broadcast, rep.carry_forward_classes);
          mu_next = mrep.mu;
        }
        rep.monitor = std::move(mrep);
      } catch (const MonitorInconclusive&) {
        rep.monitor_inconclusive = true;
        if (k_changed) mu_next = std::vector<double>(schedule.num_classes, 1.0);
      }
    }
  } else if (mode == Mode::FedavgSelftrainUniform) {
    // Ablation: self-training on the same schedule as the monitored path but
    // with mu fixed to all ones and no carry-forward.
    if (k_changed && server.have_last_deltas)
      mu_next = std::vector<double>(schedule.num_classes, 1.0);
  }

  // (e) advance server state.
  server.theta_current = agg;
  server.last_deltas = std::move(deltas);
  server.have_last_deltas = true;
  server.k_prev = rep.k;
  server.mu_current = std::move(mu_next);
  server.round = t;

  rep.aggregated = server.theta_current;
  rep.metrics = evaluate(server.theta_current, data.test_set);
  rep.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

std::vector<RoundReport> run_scenario(const ScenarioSchedule& schedule,
                                      Mode mode, std::uint64_t seed) {
  schedule.validate();
  const ScenarioData data = build_scenario_data(schedule, seed);

  ServerState server;
  server.theta_current = data.initial_params;

  std::vector<RoundReport> reports;
  reports.reserve(schedule.total_rounds);
  for (std::size_t t = 1; t <= schedule.total_rounds; ++t) {
    reports.push_back(run_round(server, schedule, data, mode, seed, t));
  }
  return reports;
}

}  // namespace fcvi
