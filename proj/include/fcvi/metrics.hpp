#pragma once

#include <cstddef>
#include <vector>

#include "fcvi/nn.hpp"

namespace fcvi {

// Rows are true classes, columns predicted classes.
struct ConfusionMatrix {
  std::size_t num_classes = 0;
  std::vector<std::size_t> counts;  // row-major L x L

  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::size_t L) : num_classes(L), counts(L * L, 0) {}

  std::size_t& at(std::size_t truth, std::size_t pred) {
    return counts[truth * num_classes + pred];
  }
  std::size_t at(std::size_t truth, std::size_t pred) const {
    return counts[truth * num_classes + pred];
  }
  std::size_t total() const;
};

struct MetricsRecord {
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  std::vector<double> precision;  // per class
  std::vector<double> recall;
  std::vector<double> f1;
};

ConfusionMatrix confusion(const std::vector<std::size_t>& predictions,
                          const std::vector<std::size_t>& truths,
                          std::size_t num_classes);

// One-vs-rest precision/recall/F1 per class, macro averaged. Classes with a
// zero denominator score 0.
MetricsRecord compute_metrics(const ConfusionMatrix& cm);

MetricsRecord evaluate(const ModelParams& params, const LabeledSet& test_set);

}  // namespace fcvi
