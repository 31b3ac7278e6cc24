#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "fcvi/dataset.hpp"
#include "fcvi/metrics.hpp"
#include "fcvi/rng.hpp"

using namespace fcvi;

TEST_CASE("confusion tallies prediction/truth pairs") {
  const std::vector<std::size_t> truths{0, 0, 1, 1, 2};
  const std::vector<std::size_t> preds{0, 1, 1, 1, 0};
  const ConfusionMatrix cm = confusion(preds, truths, 3);
  CHECK(cm.total() == 5);
  CHECK(cm.at(0, 0) == 1);
  CHECK(cm.at(0, 1) == 1);
  CHECK(cm.at(1, 1) == 2);
  CHECK(cm.at(2, 0) == 1);
  CHECK(cm.at(2, 2) == 0);
}

TEST_CASE("confusion rejects mismatched or out-of-range input") {
  CHECK_THROWS_AS(confusion({0, 1}, {0}, 2), std::invalid_argument);
  CHECK_THROWS_AS(confusion({2}, {0}, 2), std::invalid_argument);
  CHECK_THROWS_AS(confusion({0}, {2}, 2), std::invalid_argument);
}

TEST_CASE("hand-worked two-class confusion matrix") {
  // [[3,1],[1,5]]: accuracy 8/10, per-class F1 {3/4, 5/6}, macro-F1 19/24.
  ConfusionMatrix cm(2);
  cm.at(0, 0) = 3;
  cm.at(0, 1) = 1;
  cm.at(1, 0) = 1;
  cm.at(1, 1) = 5;
  const MetricsRecord m = compute_metrics(cm);
  CHECK(std::abs(m.accuracy - 0.8) < 1e-12);
  CHECK(std::abs(m.precision[0] - 0.75) < 1e-12);
  CHECK(std::abs(m.recall[0] - 0.75) < 1e-12);
  CHECK(std::abs(m.f1[0] - 0.75) < 1e-12);
  CHECK(std::abs(m.precision[1] - 5.0 / 6.0) < 1e-12);
  CHECK(std::abs(m.recall[1] - 5.0 / 6.0) < 1e-12);
  CHECK(std::abs(m.f1[1] - 5.0 / 6.0) < 1e-12);
  CHECK(std::abs(m.macro_f1 - 19.0 / 24.0) < 1e-12);
  CHECK(std::abs(m.macro_precision - 19.0 / 24.0) < 1e-12);
  CHECK(std::abs(m.macro_recall - 19.0 / 24.0) < 1e-12);
}

TEST_CASE("zero-denominator classes score zero") {
  // Class 1 never appears in truth or prediction.
  ConfusionMatrix cm(2);
  cm.at(0, 0) = 4;
  const MetricsRecord m = compute_metrics(cm);
  CHECK(m.accuracy == doctest::Approx(1.0));
  CHECK(m.precision[1] == 0.0);
  CHECK(m.recall[1] == 0.0);
  CHECK(m.f1[1] == 0.0);
  CHECK(m.macro_f1 == doctest::Approx(0.5));
}

TEST_CASE("empty matrix is rejected") {
  CHECK_THROWS_AS(compute_metrics(ConfusionMatrix(3)), std::invalid_argument);
}

TEST_CASE("perfect predictions score 1 everywhere") {
  ConfusionMatrix cm(3);
  cm.at(0, 0) = 7;
  cm.at(1, 1) = 2;
  cm.at(2, 2) = 11;
  const MetricsRecord m = compute_metrics(cm);
  CHECK(m.accuracy == doctest::Approx(1.0));
  CHECK(m.macro_precision == doctest::Approx(1.0));
  CHECK(m.macro_recall == doctest::Approx(1.0));
  CHECK(m.macro_f1 == doctest::Approx(1.0));
}

TEST_CASE("two F1 formulations agree on random confusion matrices") {
  // 2*P*R/(P+R) versus 2*TP/(2*TP + FP + FN), elementwise, 1000 matrices.
  Rng rng(2024);
  std::uniform_int_distribution<std::size_t> ncls(2, 6);
  std::uniform_int_distribution<std::size_t> cell(0, 20);
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t L = ncls(rng);
    ConfusionMatrix cm(L);
    for (auto& c : cm.counts) c = cell(rng);
    if (cm.total() == 0) cm.at(0, 0) = 1;
    const MetricsRecord m = compute_metrics(cm);
    for (std::size_t l = 0; l < L; ++l) {
      const double tp = static_cast<double>(cm.at(l, l));
      double fp = 0.0, fn = 0.0;
      for (std::size_t j = 0; j < L; ++j) {
        if (j == l) continue;
        fp += static_cast<double>(cm.at(j, l));
        fn += static_cast<double>(cm.at(l, j));
      }
      const double denom = 2.0 * tp + fp + fn;
      const double f1_direct = denom > 0.0 ? 2.0 * tp / denom : 0.0;
      const double p = m.precision[l];
      const double r = m.recall[l];
      const double f1_pr = (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
      CHECK(std::abs(m.f1[l] - f1_direct) < 1e-12);
      CHECK(std::abs(m.f1[l] - f1_pr) < 1e-12);
    }
  }
}

TEST_CASE("evaluate matches confusion of argmax predictions") {
  const GaussianSpec spec = simplex_spec(3, 4, 8.0, 0.3);
  const LabeledSet test = generate_class_data(spec, {30, 30, 30}, 11);
  const ModelParams params = ModelParams::random_init(4, 6, 3, 55);

  std::vector<std::size_t> preds;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const ForwardTrace tr = forward(params, test.features.row(i));
    std::size_t best = 0;
    for (std::size_t l = 1; l < 3; ++l)
      if (tr.probabilities[l] > tr.probabilities[best]) best = l;
    preds.push_back(best);
  }
  const MetricsRecord direct = compute_metrics(confusion(preds, test.labels, 3));
  const MetricsRecord via = evaluate(params, test);
  CHECK(via.accuracy == doctest::Approx(direct.accuracy).epsilon(1e-15));
  CHECK(via.macro_f1 == doctest::Approx(direct.macro_f1).epsilon(1e-15));
}
