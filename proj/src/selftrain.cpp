#include "fcvi/selftrain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fcvi/rng.hpp"

namespace fcvi {

std::vector<std::size_t> PseudoLabeledSet::class_counts(std::size_t num_classes) const {
  std::vector<std::size_t> counts(num_classes, 0);
  for (const auto& it : items) {
    if (it.pseudo_label >= num_classes)
      throw std::invalid_argument("PseudoLabeledSet: label out of range");
    ++counts[it.pseudo_label];
  }
  return counts;
}

void SelfTrainConfig::validate() const {
  if (!(tau > 0.0)) throw std::invalid_argument("SelfTrainConfig: tau must be > 0");
  if (max_iters < 1) throw std::invalid_argument("SelfTrainConfig: max_iters must be >= 1");
}

PseudoLabeledSet pseudo_label(const ModelParams& model,
                              const Matrix& unlabeled_features, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("pseudo_label: tau must be > 0");
  PseudoLabeledSet out;
  for (std::size_t r = 0; r < unlabeled_features.rows; ++r) {
    const auto x = unlabeled_features.row(r);
    const ForwardTrace tr = forward(model, x);
    std::size_t best = 0;
    for (std::size_t l = 1; l < tr.probabilities.size(); ++l)
      if (tr.probabilities[l] > tr.probabilities[best]) best = l;
    if (tr.probabilities[best] >= tau) {
      out.items.push_back({std::vector<double>(x.begin(), x.end()), best,
                           tr.probabilities[best], r});
    }
  }
  return out;
}

PseudoLabeledSet select_subset(const PseudoLabeledSet& pseudo,
                               const std::vector<double>& mu) {
  for (double m : mu) {
    if (!(m > 0.0) || m > 1.0)
      throw std::invalid_argument("select_subset: mu entries must be in (0,1]");
  }

  std::vector<char> keep(pseudo.items.size(), 0);
  for (std::size_t p = 0; p < mu.size(); ++p) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < pseudo.items.size(); ++i) {
      if (pseudo.items[i].pseudo_label >= mu.size())
        throw std::invalid_argument("select_subset: label out of range for mu");
      if (pseudo.items[i].pseudo_label == p) idx.push_back(i);
    }
    if (idx.empty()) continue;
    const std::size_t n_keep = static_cast<std::size_t>(
        std::ceil(mu[p] * static_cast<double>(idx.size())));
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      if (pseudo.items[a].confidence != pseudo.items[b].confidence)
        return pseudo.items[a].confidence > pseudo.items[b].confidence;
      return pseudo.items[a].source_index < pseudo.items[b].source_index;
    });
    for (std::size_t k = 0; k < n_keep && k < idx.size(); ++k) keep[idx[k]] = 1;
  }

  PseudoLabeledSet out;
  for (std::size_t i = 0; i < pseudo.items.size(); ++i)
    if (keep[i]) out.items.push_back(pseudo.items[i]);
  return out;
}

LabeledSet expand_label_set(const LabeledSet& labeled,
                            const PseudoLabeledSet& subset) {
  for (const auto& it : subset.items) {
    if (labeled.size() > 0 && it.x.size() != labeled.dim())
      throw std::invalid_argument("expand_label_set: feature dimension mismatch");
  }
  const std::size_t d = labeled.size() > 0 ? labeled.dim()
                        : (subset.items.empty() ? 0 : subset.items[0].x.size());
  LabeledSet out;
  out.features = Matrix(labeled.size() + subset.size(), d);
  out.labels.reserve(labeled.size() + subset.size());
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    const auto src = labeled.features.row(i);
    std::copy(src.begin(), src.end(), out.features.row(i).begin());
    out.labels.push_back(labeled.labels[i]);
  }
  for (std::size_t j = 0; j < subset.size(); ++j) {
    const auto& it = subset.items[j];
    std::copy(it.x.begin(), it.x.end(), out.features.row(labeled.size() + j).begin());
    out.labels.push_back(it.pseudo_label);
  }
  return out;
}

SelfTrainResult self_train(const ModelParams& model, const ClientDataset& client,
                           const std::vector<double>& mu,
                           const SelfTrainConfig& stc, const TrainConfig& tc) {
  stc.validate();
  tc.validate();
  if (mu.size() != model.num_classes())
    throw std::invalid_argument("self_train: mu length mismatch");

  SelfTrainResult res;
  // Step 1: fit the labeled set (no-op when the client has no labels).
  res.params = train_local(model, client.labeled, tc);

  std::vector<std::size_t> pool(client.unlabeled.size());
  std::iota(pool.begin(), pool.end(), std::size_t{0});

  LabeledSet expanded = client.labeled;
  for (std::size_t iter = 0; iter < stc.max_iters; ++iter) {
    if (pool.empty()) break;

    Matrix sub(pool.size(), client.unlabeled.features.cols);
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const auto src = client.unlabeled.features.row(pool[i]);
      std::copy(src.begin(), src.end(), sub.row(i).begin());
    }

    PseudoLabeledSet pseudo = pseudo_label(res.params, sub, stc.tau);
    if (pseudo.empty()) break;
    for (auto& it : pseudo.items) it.source_index = pool[it.source_index];

    const PseudoLabeledSet selected = select_subset(pseudo, mu);
    expanded = expand_label_set(expanded, selected);

    TrainConfig tci = tc;
    tci.rng_seed = mix_seed(tc.rng_seed, 0x5e1f, iter + 1);
    res.params = train_local(res.params, expanded, tci);

    res.diagnostics.kept_per_class.push_back(
        selected.class_counts(model.num_classes()));

    if (stc.consume_selected) {
      std::vector<char> taken(client.unlabeled.size(), 0);
      for (const auto& it : selected.items) taken[it.source_index] = 1;
      std::erase_if(pool, [&](std::size_t s) { return taken[s] != 0; });
    }
  }
  return res;
}

}  // namespace fcvi
