#include "fcvi/dataset.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "fcvi/rng.hpp"

namespace fcvi {

std::vector<std::size_t> LabeledSet::class_counts(std::size_t num_classes) const {
  std::vector<std::size_t> counts(num_classes, 0);
  for (std::size_t y : labels) {
    if (y >= num_classes) throw std::invalid_argument("class_counts: label out of range");
    ++counts[y];
  }
  return counts;
}

GaussianSpec simplex_spec(std::size_t num_classes, std::size_t dim,
                          double mean_scale, double sigma) {
  if (num_classes > dim) throw std::invalid_argument("simplex_spec: need num_classes <= dim");
  if (sigma <= 0.0) throw std::invalid_argument("simplex_spec: sigma must be positive");
  GaussianSpec spec;
  spec.sigma = sigma;
  spec.class_means.assign(num_classes, std::vector<double>(dim, 0.0));
  for (std::size_t l = 0; l < num_classes; ++l) {
    spec.class_means[l][l] = mean_scale;
  }
  return spec;
}

LabeledSet generate_class_data(const GaussianSpec& spec,
                               const std::vector<std::size_t>& counts,
                               std::uint64_t seed) {
  if (counts.size() != spec.num_classes())
    throw std::invalid_argument("generate_class_data: counts size mismatch");
  if (spec.sigma <= 0.0) throw std::invalid_argument("generate_class_data: sigma must be positive");

  const std::size_t d = spec.dim();
  const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});

  LabeledSet out;
  out.features = Matrix(total, d);
  out.labels.reserve(total);

  Rng rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::size_t row = 0;
  for (std::size_t l = 0; l < counts.size(); ++l) {
    for (std::size_t k = 0; k < counts[l]; ++k) {
      for (std::size_t j = 0; j < d; ++j) {
        out.features.at(row, j) = spec.class_means[l][j] + spec.sigma * n01(rng);
      }
      out.labels.push_back(l);
      ++row;
    }
  }
  return out;
}

std::vector<std::size_t> stratified_labeled_counts(
    const std::vector<std::size_t>& totals, double beta) {
  if (beta < 0.0 || beta > 1.0)
    throw std::invalid_argument("stratified_labeled_counts: beta must be in [0,1]");

  const std::size_t num_classes = totals.size();
  const double n_total = static_cast<double>(
      std::accumulate(totals.begin(), totals.end(), std::size_t{0}));
  const long long target = std::llround(beta * n_total);

  std::vector<std::size_t> base(num_classes, 0);
  std::vector<double> frac(num_classes, 0.0);
  long long allotted = 0;
  for (std::size_t l = 0; l < num_classes; ++l) {
    const double exact = beta * static_cast<double>(totals[l]);
    base[l] = static_cast<std::size_t>(std::floor(exact));
    if (base[l] > totals[l]) base[l] = totals[l];
    frac[l] = exact - static_cast<double>(base[l]);
    allotted += static_cast<long long>(base[l]);
  }

  long long rem = target - allotted;
  std::vector<std::size_t> order(num_classes);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return frac[a] > frac[b];
  });
  for (std::size_t l : order) {
    if (rem <= 0) break;
    if (base[l] < totals[l] && frac[l] > 0.0) {
      ++base[l];
      --rem;
    }
  }
  // Numerical corner: hand out leftovers to any class with room.
  for (std::size_t l : order) {
    if (rem <= 0) break;
    if (base[l] < totals[l]) {
      ++base[l];
      --rem;
    }
  }
  return base;
}

std::pair<LabeledSet, UnlabeledSet> split_labeled_unlabeled(
    const LabeledSet& all, std::size_t num_classes, double beta,
    std::uint64_t seed) {
  const auto totals = all.class_counts(num_classes);
  const auto lab_counts = stratified_labeled_counts(totals, beta);

  std::vector<char> is_labeled(all.size(), 0);
  Rng rng(seed);
  for (std::size_t l = 0; l < num_classes; ++l) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (all.labels[i] == l) idx.push_back(i);
    }
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t k = 0; k < lab_counts[l]; ++k) is_labeled[idx[k]] = 1;
  }

  std::size_t n_lab = 0;
  for (char f : is_labeled) n_lab += static_cast<std::size_t>(f);

  LabeledSet labeled;
  labeled.features = Matrix(n_lab, all.dim());
  labeled.labels.reserve(n_lab);
  UnlabeledSet unlabeled;
  unlabeled.features = Matrix(all.size() - n_lab, all.dim());
  unlabeled.oracle_labels.reserve(all.size() - n_lab);

  std::size_t lr = 0, ur = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto src = all.features.row(i);
    if (is_labeled[i]) {
      std::copy(src.begin(), src.end(), labeled.features.row(lr).begin());
      labeled.labels.push_back(all.labels[i]);
      ++lr;
    } else {
      std::copy(src.begin(), src.end(), unlabeled.features.row(ur).begin());
      unlabeled.oracle_labels.push_back(all.labels[i]);
      ++ur;
    }
  }
  return {std::move(labeled), std::move(unlabeled)};
}

}  // namespace fcvi
