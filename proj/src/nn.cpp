#include "fcvi/nn.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <stdexcept>

#include "fcvi/rng.hpp"

namespace fcvi {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
  if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
  if (local_epochs < 1) throw std::invalid_argument("TrainConfig: local_epochs must be >= 1");
}

ModelParams ModelParams::zeros(std::size_t d, std::size_t s, std::size_t L) {
  if (d < 1 || s < 1 || L < 2) throw std::invalid_argument("ModelParams: need d>=1, s>=1, L>=2");
  ModelParams p;
  p.hidden_weights = Matrix(s, d);
  p.hidden_bias.assign(s, 0.0);
  p.output_weights = Matrix(L, s);
  p.output_bias.assign(L, 0.0);
  return p;
}

ModelParams ModelParams::random_init(std::size_t d, std::size_t s, std::size_t L,
                                     std::uint64_t seed) {
  ModelParams p = zeros(d, s, L);
  Rng rng(seed);
  const double hb = 1.0 / std::sqrt(static_cast<double>(d));
  const double ob = 1.0 / std::sqrt(static_cast<double>(s));
  std::uniform_real_distribution<double> uh(-hb, hb);
  std::uniform_real_distribution<double> uo(-ob, ob);
  for (double& w : p.hidden_weights.data) w = uh(rng);
  for (double& w : p.hidden_bias) w = uh(rng);
  for (double& w : p.output_weights.data) w = uo(rng);
  for (double& w : p.output_bias) w = uo(rng);
  return p;
}

std::vector<double> ModelParams::output_row(std::size_t l) const {
  if (l >= num_classes()) throw std::invalid_argument("output_row: class index out of range");
  std::vector<double> v(hidden_units() + 1);
  const auto r = output_weights.row(l);
  std::copy(r.begin(), r.end(), v.begin());
  v.back() = output_bias[l];
  return v;
}

void ModelParams::set_output_row(std::size_t l, std::span<const double> v) {
  if (l >= num_classes()) throw std::invalid_argument("set_output_row: class index out of range");
  if (v.size() != hidden_units() + 1)
    throw std::invalid_argument("set_output_row: row length mismatch");
  std::copy(v.begin(), v.end() - 1, output_weights.row(l).begin());
  output_bias[l] = v.back();
}

bool ModelParams::same_shape(const ModelParams& o) const {
  return hidden_weights.same_shape(o.hidden_weights) &&
         hidden_bias.size() == o.hidden_bias.size() &&
         output_weights.same_shape(o.output_weights) &&
         output_bias.size() == o.output_bias.size();
}

bool ModelParams::finite() const {
  return all_finite(hidden_weights.data) && all_finite(hidden_bias) &&
         all_finite(output_weights.data) && all_finite(output_bias);
}

ForwardTrace forward(const ModelParams& params, std::span<const double> x) {
  if (x.size() != params.input_dim())
    throw std::invalid_argument("forward: input dimension mismatch");

  const std::size_t s = params.hidden_units();
  const std::size_t L = params.num_classes();

  ForwardTrace tr;
  tr.hidden.resize(s);
  for (std::size_t i = 0; i < s; ++i) {
    const double pre = dot(params.hidden_weights.row(i), x) + params.hidden_bias[i];
    tr.hidden[i] = pre > 0.0 ? pre : 0.0;
  }

  tr.logits.resize(L);
  for (std::size_t l = 0; l < L; ++l) {
    tr.logits[l] = dot(params.output_weights.row(l), tr.hidden) + params.output_bias[l];
  }

  // Softmax with max subtraction.
  const double zmax = *std::max_element(tr.logits.begin(), tr.logits.end());
  tr.probabilities.resize(L);
  double denom = 0.0;
  for (std::size_t l = 0; l < L; ++l) {
    tr.probabilities[l] = std::exp(tr.logits[l] - zmax);
    denom += tr.probabilities[l];
  }
  for (double& p : tr.probabilities) p /= denom;
  return tr;
}

double cross_entropy(std::span<const double> probabilities, std::size_t y) {
  if (y >= probabilities.size())
    throw std::invalid_argument("cross_entropy: label out of range");
  return -std::log(probabilities[y]);
}

Gradients backward(const ModelParams& params, const LabeledSet& data,
                   std::span<const std::size_t> indices) {
  if (indices.empty()) throw std::invalid_argument("backward: empty batch");
  if (data.dim() != params.input_dim())
    throw std::invalid_argument("backward: feature dimension mismatch");

  const std::size_t d = params.input_dim();
  const std::size_t s = params.hidden_units();
  const std::size_t L = params.num_classes();

  Gradients g = ModelParams::zeros(d, s, L);
  std::vector<double> dh(s);

  for (std::size_t i : indices) {
    const auto x = data.features.row(i);
    const std::size_t y = data.labels[i];
    if (y >= L) throw std::invalid_argument("backward: label out of range");

    const ForwardTrace tr = forward(params, x);

    // Logit-level gradient: probabilities - onehot(y).
    std::vector<double> dz = tr.probabilities;
    dz[y] -= 1.0;

    for (std::size_t l = 0; l < L; ++l) {
      auto grow = g.output_weights.row(l);
      for (std::size_t j = 0; j < s; ++j) grow[j] += dz[l] * tr.hidden[j];
      g.output_bias[l] += dz[l];
    }

    for (std::size_t j = 0; j < s; ++j) {
      double acc = 0.0;
      for (std::size_t l = 0; l < L; ++l) acc += params.output_weights.at(l, j) * dz[l];
      dh[j] = tr.hidden[j] > 0.0 ? acc : 0.0;  // ReLU subgradient, 0 at the kink
    }

    for (std::size_t j = 0; j < s; ++j) {
      if (dh[j] == 0.0) continue;
      auto hrow = g.hidden_weights.row(j);
      for (std::size_t k = 0; k < d; ++k) hrow[k] += dh[j] * x[k];
      g.hidden_bias[j] += dh[j];
    }
  }

  const double scale = 1.0 / static_cast<double>(indices.size());
  for (double& v : g.hidden_weights.data) v *= scale;
  for (double& v : g.hidden_bias) v *= scale;
  for (double& v : g.output_weights.data) v *= scale;
  for (double& v : g.output_bias) v *= scale;
  return g;
}

Gradients backward(const ModelParams& params, const LabeledSet& batch) {
  std::vector<std::size_t> idx(batch.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return backward(params, batch, idx);
}

ModelParams sgd_step(const ModelParams& params, const Gradients& grads,
                     double learning_rate) {
  if (!params.same_shape(grads)) throw std::invalid_argument("sgd_step: shape mismatch");
  ModelParams out = params;
  for (std::size_t i = 0; i < out.hidden_weights.data.size(); ++i)
    out.hidden_weights.data[i] -= learning_rate * grads.hidden_weights.data[i];
  for (std::size_t i = 0; i < out.hidden_bias.size(); ++i)
    out.hidden_bias[i] -= learning_rate * grads.hidden_bias[i];
  for (std::size_t i = 0; i < out.output_weights.data.size(); ++i)
    out.output_weights.data[i] -= learning_rate * grads.output_weights.data[i];
  for (std::size_t i = 0; i < out.output_bias.size(); ++i)
    out.output_bias[i] -= learning_rate * grads.output_bias[i];
  return out;
}

ModelParams train_local(const ModelParams& params, const LabeledSet& labeled,
                        const TrainConfig& cfg) {
  cfg.validate();
  if (labeled.size() == 0) {
    std::cerr << "warning: train_local called with empty labeled set, skipping\n";
    return params;
  }

  Rng rng(cfg.rng_seed);
  std::vector<std::size_t> idx(labeled.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});

  ModelParams cur = params;
  for (std::size_t ep = 0; ep < cfg.local_epochs; ++ep) {
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t start = 0; start < idx.size(); start += cfg.batch_size) {
      const std::size_t len = std::min(cfg.batch_size, idx.size() - start);
      const std::span<const std::size_t> batch(idx.data() + start, len);
      const Gradients g = backward(cur, labeled, batch);
      cur = sgd_step(cur, g, cfg.learning_rate);
    }
  }
  return cur;
}

double inf_norm(const ModelParams& params) {
  double m = 0.0;
  auto scan = [&m](const std::vector<double>& v) {
    for (double x : v) m = std::max(m, std::abs(x));
  };
  scan(params.hidden_weights.data);
  scan(params.hidden_bias);
  scan(params.output_weights.data);
  scan(params.output_bias);
  return m;
}

}  // namespace fcvi
