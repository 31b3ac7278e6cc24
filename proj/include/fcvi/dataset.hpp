#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fcvi/matrix.hpp"

namespace fcvi {

struct LabeledSet {
  Matrix features;                  // N x d
  std::vector<std::size_t> labels;  // N

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return features.cols; }
  std::vector<std::size_t> class_counts(std::size_t num_classes) const;
};

// Unlabeled pool. oracle_labels exist for evaluation only; every
// training-path operation takes the features matrix, never this struct.
struct UnlabeledSet {
  Matrix features;                         // C x d
  std::vector<std::size_t> oracle_labels;  // C, evaluation-only

  std::size_t size() const { return oracle_labels.size(); }
};

struct ClientDataset {
  LabeledSet labeled;
  UnlabeledSet unlabeled;
};

// Isotropic Gaussian blobs, one per class.
struct GaussianSpec {
  std::vector<std::vector<double>> class_means;
  double sigma = 1.0;

  std::size_t num_classes() const { return class_means.size(); }
  std::size_t dim() const { return class_means.empty() ? 0 : class_means[0].size(); }
};

// Class means placed on scaled coordinate axes (requires num_classes <= dim).
GaussianSpec simplex_spec(std::size_t num_classes, std::size_t dim,
                          double mean_scale, double sigma);

// Draws exactly counts[l] samples from N(mean_l, sigma^2 I), class-major order.
LabeledSet generate_class_data(const GaussianSpec& spec,
                               const std::vector<std::size_t>& counts,
                               std::uint64_t seed);

// Per-class labeled allocation for a stratified split with label fraction
// beta: total labeled = round(beta * N), each class within +-1 of beta * n_l.
std::vector<std::size_t> stratified_labeled_counts(
    const std::vector<std::size_t>& totals, double beta);

std::pair<LabeledSet, UnlabeledSet> split_labeled_unlabeled(
    const LabeledSet& all, std::size_t num_classes, double beta,
    std::uint64_t seed);

}  // namespace fcvi
