#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fcvi/dataset.hpp"
#include "fcvi/matrix.hpp"

namespace fcvi {

struct TrainConfig {
  double learning_rate = 0.05;
  std::size_t batch_size = 20;
  std::size_t local_epochs = 1;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

// One-hidden-layer softmax classifier. The per-class unit of interest is the
// output row: row l of output_weights plus output_bias[l].
struct ModelParams {
  Matrix hidden_weights;            // s x d
  std::vector<double> hidden_bias;  // s
  Matrix output_weights;            // L x s
  std::vector<double> output_bias;  // L

  std::size_t input_dim() const { return hidden_weights.cols; }
  std::size_t hidden_units() const { return hidden_weights.rows; }
  std::size_t num_classes() const { return output_weights.rows; }

  static ModelParams zeros(std::size_t d, std::size_t s, std::size_t L);
  // Uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases included.
  static ModelParams random_init(std::size_t d, std::size_t s, std::size_t L,
                                 std::uint64_t seed);

  // Row l of output_weights with output_bias[l] appended (length s+1).
  std::vector<double> output_row(std::size_t l) const;
  void set_output_row(std::size_t l, std::span<const double> v);

  bool same_shape(const ModelParams& o) const;
  bool finite() const;
  bool operator==(const ModelParams&) const = default;
};

using Gradients = ModelParams;

struct ForwardTrace {
  std::vector<double> hidden;         // s, ReLU activations
  std::vector<double> logits;         // L
  std::vector<double> probabilities;  // L, softmax of logits
};

ForwardTrace forward(const ModelParams& params, std::span<const double> x);

double cross_entropy(std::span<const double> probabilities, std::size_t y);

// Gradient of the mean cross-entropy over the batch.
Gradients backward(const ModelParams& params, const LabeledSet& batch);
Gradients backward(const ModelParams& params, const LabeledSet& data,
                   std::span<const std::size_t> indices);

ModelParams sgd_step(const ModelParams& params, const Gradients& grads,
                     double learning_rate);

// Seeded shuffled mini-batch SGD for cfg.local_epochs epochs. An empty
// labeled set is a warned no-op (churn can leave a client without labels).
ModelParams train_local(const ModelParams& params, const LabeledSet& labeled,
                        const TrainConfig& cfg);

double inf_norm(const ModelParams& params);

}  // namespace fcvi
