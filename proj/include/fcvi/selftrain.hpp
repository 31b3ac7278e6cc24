#pragma once

#include <cstddef>
#include <vector>

#include "fcvi/dataset.hpp"
#include "fcvi/nn.hpp"

namespace fcvi {

struct PseudoItem {
  std::vector<double> x;
  std::size_t pseudo_label = 0;
  double confidence = 0.0;       // max softmax probability of the predictor
  std::size_t source_index = 0;  // row in the client's unlabeled pool
};

struct PseudoLabeledSet {
  std::vector<PseudoItem> items;

  bool empty() const { return items.empty(); }
  std::size_t size() const { return items.size(); }
  std::vector<std::size_t> class_counts(std::size_t num_classes) const;
};

struct SelfTrainConfig {
  double tau = 0.90;              // confidence threshold; > 1 is a test-only
                                  // override that disables pseudo-labeling
  std::size_t max_iters = 3;
  bool consume_selected = true;   // selected items leave the pool within a round

  void validate() const;
};

// Items whose top probability reaches tau, labeled by argmax.
PseudoLabeledSet pseudo_label(const ModelParams& model,
                              const Matrix& unlabeled_features, double tau);

// Keeps the ceil(mu[p] * n_p) highest-confidence items of each class p; ties
// broken toward the smaller source index.
PseudoLabeledSet select_subset(const PseudoLabeledSet& pseudo,
                               const std::vector<double>& mu);

// Labeled set followed by the pseudo-labeled items, originals first.
LabeledSet expand_label_set(const LabeledSet& labeled,
                            const PseudoLabeledSet& subset);

struct SelfTrainDiagnostics {
  // kept_per_class[i][p]: items of class p added to the label set in iteration i.
  std::vector<std::vector<std::size_t>> kept_per_class;
  std::size_t iterations() const { return kept_per_class.size(); }
};

struct SelfTrainResult {
  ModelParams params;
  SelfTrainDiagnostics diagnostics;
};

// Train on labels, then iterate pseudo-label -> mu-proportional subset ->
// expand -> retrain, until the pool or the pseudo-label set runs dry.
SelfTrainResult self_train(const ModelParams& model, const ClientDataset& client,
                           const std::vector<double>& mu,
                           const SelfTrainConfig& stc, const TrainConfig& tc);

}  // namespace fcvi
