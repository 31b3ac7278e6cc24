#include "fcvi/metrics.hpp"

#include <numeric>
#include <stdexcept>

namespace fcvi {

std::size_t ConfusionMatrix::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

ConfusionMatrix confusion(const std::vector<std::size_t>& predictions,
                          const std::vector<std::size_t>& truths,
                          std::size_t num_classes) {
  if (predictions.size() != truths.size())
    throw std::invalid_argument("confusion: length mismatch");
  ConfusionMatrix cm(num_classes);
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (truths[i] >= num_classes || predictions[i] >= num_classes)
      throw std::invalid_argument("confusion: class index out of range");
    ++cm.at(truths[i], predictions[i]);
  }
  return cm;
}

MetricsRecord compute_metrics(const ConfusionMatrix& cm) {
  const std::size_t L = cm.num_classes;
  const std::size_t total = cm.total();
  if (total == 0) throw std::invalid_argument("compute_metrics: empty confusion matrix");

  MetricsRecord rec;
  rec.precision.resize(L);
  rec.recall.resize(L);
  rec.f1.resize(L);

  std::size_t trace = 0;
  for (std::size_t l = 0; l < L; ++l) trace += cm.at(l, l);
  rec.accuracy = static_cast<double>(trace) / static_cast<double>(total);

  for (std::size_t l = 0; l < L; ++l) {
    const double tp = static_cast<double>(cm.at(l, l));
    double colsum = 0.0, rowsum = 0.0;
    for (std::size_t k = 0; k < L; ++k) {
      colsum += static_cast<double>(cm.at(k, l));
      rowsum += static_cast<double>(cm.at(l, k));
    }
    const double fp = colsum - tp;
    const double fn = rowsum - tp;
    const double p = (tp + fp) > 0.0 ? tp / (tp + fp) : 0.0;
    const double r = (tp + fn) > 0.0 ? tp / (tp + fn) : 0.0;
    const double f = (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    rec.precision[l] = p;
    rec.recall[l] = r;
    rec.f1[l] = f;
    rec.macro_precision += p;
    rec.macro_recall += r;
    rec.macro_f1 += f;
  }
  rec.macro_precision /= static_cast<double>(L);
  rec.macro_recall /= static_cast<double>(L);
  rec.macro_f1 /= static_cast<double>(L);
  return rec;
}

MetricsRecord evaluate(const ModelParams& params, const LabeledSet& test_set) {
  std::vector<std::size_t> preds(test_set.size());
  for (std::size_t i = 0; i < test_set.size(); ++i) {
    const ForwardTrace tr = forward(params, test_set.features.row(i));
    std::size_t best = 0;
    for (std::size_t l = 1; l < tr.probabilities.size(); ++l) {
      if (tr.probabilities[l] > tr.probabilities[best]) best = l;
    }
    preds[i] = best;
  }
  return compute_metrics(confusion(preds, test_set.labels, params.num_classes()));
}

}  // namespace fcvi
