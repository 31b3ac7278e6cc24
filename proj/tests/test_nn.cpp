#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>

#include "fcvi/nn.hpp"
#include "fcvi/rng.hpp"

using namespace fcvi;

namespace {

LabeledSet make_set(const std::vector<std::vector<double>>& xs,
                    const std::vector<std::size_t>& ys) {
  LabeledSet s;
  s.features = Matrix(xs.size(), xs.empty() ? 0 : xs[0].size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    std::copy(xs[i].begin(), xs[i].end(), s.features.row(i).begin());
  s.labels = ys;
  return s;
}

// Flattened parameter view used by the finite-difference check.
std::vector<double*> param_ptrs(ModelParams& p) {
  std::vector<double*> out;
  for (double& v : p.hidden_weights.data) out.push_back(&v);
  for (double& v : p.hidden_bias) out.push_back(&v);
  for (double& v : p.output_weights.data) out.push_back(&v);
  for (double& v : p.output_bias) out.push_back(&v);
  return out;
}

double batch_loss(const ModelParams& p, const LabeledSet& batch) {
  double acc = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto tr = forward(p, batch.features.row(i));
    acc += cross_entropy(tr.probabilities, batch.labels[i]);
  }
  return acc / static_cast<double>(batch.size());
}

// Random instance with hidden pre-activations kept away from the ReLU kink so
// central differences stay valid.
struct GradInstance {
  ModelParams params;
  LabeledSet batch;
};

GradInstance random_instance(std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> dd(2, 6), ds(1, 8), dl(2, 5), db(1, 8);
  std::uniform_real_distribution<double> ux(-2.0, 2.0);
  for (;;) {
    const std::size_t d = dd(rng), s = ds(rng), L = dl(rng), n = db(rng);
    GradInstance gi;
    gi.params = ModelParams::random_init(d, s, L, rng());
    gi.batch.features = Matrix(n, d);
    gi.batch.labels.resize(n);
    std::uniform_int_distribution<std::size_t> dy(0, L - 1);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) gi.batch.features.at(i, j) = ux(rng);
      gi.batch.labels[i] = dy(rng);
    }
    bool near_kink = false;
    for (std::size_t i = 0; i < n && !near_kink; ++i) {
      for (std::size_t j = 0; j < s; ++j) {
        const double pre = dot(gi.params.hidden_weights.row(j),
                               gi.batch.features.row(i)) +
                           gi.params.hidden_bias[j];
        if (std::abs(pre) < 1e-3) {
          near_kink = true;
          break;
        }
      }
    }
    if (!near_kink) return gi;
  }
}

double max_fd_rel_error(const GradInstance& gi, double h) {
  ModelParams work = gi.params;
  Gradients g = backward(gi.params, gi.batch);
  ModelParams gview = g;
  auto wp = param_ptrs(work);
  auto gp = param_ptrs(gview);
  double worst = 0.0;
  for (std::size_t i = 0; i < wp.size(); ++i) {
    const double orig = *wp[i];
    *wp[i] = orig + h;
    const double fp = batch_loss(work, gi.batch);
    *wp[i] = orig - h;
    const double fm = batch_loss(work, gi.batch);
    *wp[i] = orig;
    const double fd = (fp - fm) / (2.0 * h);
    const double an = *gp[i];
    const double rel = std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1.0});
    worst = std::max(worst, rel);
  }
  return worst;
}

}  // namespace

TEST_CASE("forward: zero params give uniform probabilities") {
  const auto p = ModelParams::zeros(3, 4, 5);
  const auto tr = forward(p, std::vector<double>{1.0, -2.0, 0.5});
  for (double q : tr.probabilities) CHECK(q == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("forward: softmax is shift invariant") {
  auto p = ModelParams::random_init(3, 4, 4, 7);
  const std::vector<double> x{0.3, -1.0, 2.0};
  const auto tr1 = forward(p, x);
  for (double& b : p.output_bias) b += 13.75;  // shifts every logit equally
  const auto tr2 = forward(p, x);
  for (std::size_t l = 0; l < 4; ++l)
    CHECK(tr2.probabilities[l] == doctest::Approx(tr1.probabilities[l]).epsilon(1e-12));
}

TEST_CASE("forward: logits [ln 3, 0] give probabilities [0.75, 0.25]") {
  auto p = ModelParams::zeros(2, 3, 2);
  p.output_bias[0] = std::log(3.0);
  const auto tr = forward(p, std::vector<double>{0.0, 0.0});
  CHECK(tr.probabilities[0] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(tr.probabilities[1] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("forward: dimension mismatch throws") {
  const auto p = ModelParams::zeros(3, 2, 2);
  CHECK_THROWS_AS(forward(p, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("forward: probabilities normalized and argmax-consistent") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto p = ModelParams::random_init(4, 6, 5, seed);
    Rng rng(mix_seed(seed, 99));
    std::uniform_real_distribution<double> ux(-3.0, 3.0);
    std::vector<double> x(4);
    for (double& v : x) v = ux(rng);
    const auto tr = forward(p, x);
    double sum = 0.0, mn = 1.0;
    std::size_t amax_p = 0, amax_z = 0;
    for (std::size_t l = 0; l < 5; ++l) {
      sum += tr.probabilities[l];
      mn = std::min(mn, tr.probabilities[l]);
      if (tr.probabilities[l] > tr.probabilities[amax_p]) amax_p = l;
      if (tr.logits[l] > tr.logits[amax_z]) amax_z = l;
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
    CHECK(mn > 0.0);
    CHECK(amax_p == amax_z);
  }
}

TEST_CASE("cross_entropy values") {
  CHECK(cross_entropy(std::vector<double>{1.0, 0.0}, 0) == doctest::Approx(0.0));
  CHECK(cross_entropy(std::vector<double>{0.25, 0.25, 0.25, 0.25}, 2) ==
        doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(cross_entropy(std::vector<double>{0.75, 0.25}, 0) ==
        doctest::Approx(0.2876820724517809).epsilon(1e-12));
  CHECK_THROWS_AS(cross_entropy(std::vector<double>{0.5, 0.5}, 2),
                  std::invalid_argument);
}

TEST_CASE("backward: zero params, single sample logit gradient structure") {
  const std::size_t L = 4;
  const auto p = ModelParams::zeros(2, 3, L);
  const auto batch = make_set({{1.0, 2.0}}, {1});
  const auto g = backward(p, batch);
  for (std::size_t l = 0; l < L; ++l) {
    const double expect = (l == 1) ? 1.0 / L - 1.0 : 1.0 / L;
    CHECK(g.output_bias[l] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("backward: batch of identical samples equals single-sample gradient") {
  const auto p = ModelParams::random_init(3, 4, 3, 21);
  const std::vector<double> x{0.5, -0.25, 1.5};
  const auto one = backward(p, make_set({x}, {2}));
  const auto many = backward(p, make_set({x, x, x, x}, {2, 2, 2, 2}));
  CHECK(one == many);
}

TEST_CASE("backward: empty batch throws") {
  const auto p = ModelParams::zeros(2, 2, 2);
  LabeledSet empty;
  empty.features = Matrix(0, 2);
  CHECK_THROWS_AS(backward(p, empty), std::invalid_argument);
}

TEST_CASE("backward: linear in batch concatenation") {
  const auto p = ModelParams::random_init(3, 5, 4, 31);
  Rng rng(77);
  std::uniform_real_distribution<double> ux(-1.5, 1.5);
  std::uniform_int_distribution<std::size_t> uy(0, 3);
  auto rand_set = [&](std::size_t n) {
    std::vector<std::vector<double>> xs(n, std::vector<double>(3));
    std::vector<std::size_t> ys(n);
    for (auto& x : xs)
      for (auto& v : x) v = ux(rng);
    for (auto& y : ys) y = uy(rng);
    return make_set(xs, ys);
  };
  const auto b1 = rand_set(3);
  const auto b2 = rand_set(5);
  LabeledSet cat;
  cat.features = Matrix(8, 3);
  for (std::size_t i = 0; i < 3; ++i) {
    auto r = b1.features.row(i);
    std::copy(r.begin(), r.end(), cat.features.row(i).begin());
    cat.labels.push_back(b1.labels[i]);
  }
  for (std::size_t i = 0; i < 5; ++i) {
    auto r = b2.features.row(i);
    std::copy(r.begin(), r.end(), cat.features.row(3 + i).begin());
    cat.labels.push_back(b2.labels[i]);
  }
  const auto g1 = backward(p, b1);
  const auto g2 = backward(p, b2);
  const auto gc = backward(p, cat);
  for (std::size_t i = 0; i < gc.output_weights.data.size(); ++i) {
    const double mix =
        (3.0 * g1.output_weights.data[i] + 5.0 * g2.output_weights.data[i]) / 8.0;
    CHECK(gc.output_weights.data[i] == doctest::Approx(mix).epsilon(1e-12));
  }
  for (std::size_t i = 0; i < gc.hidden_weights.data.size(); ++i) {
    const double mix =
        (3.0 * g1.hidden_weights.data[i] + 5.0 * g2.hidden_weights.data[i]) / 8.0;
    CHECK(gc.hidden_weights.data[i] == doctest::Approx(mix).epsilon(1e-12));
  }
}

TEST_CASE("backward matches central finite differences") {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed)
    worst = std::max(worst, max_fd_rel_error(random_instance(seed), 1e-5));
  CHECK(worst < 1e-5);
}

TEST_CASE("sgd_step identities") {
  const auto p = ModelParams::random_init(2, 3, 2, 5);
  const auto zero = ModelParams::zeros(2, 3, 2);
  CHECK(sgd_step(p, zero, 0.7) == p);
  auto g = zero;
  g.hidden_weights.at(0, 0) = 1.0;
  CHECK(sgd_step(p, g, 0.0) == p);

  auto scalar = ModelParams::zeros(1, 1, 2);
  scalar.hidden_weights.at(0, 0) = 1.0;
  auto gs = ModelParams::zeros(1, 1, 2);
  gs.hidden_weights.at(0, 0) = 0.5;
  CHECK(sgd_step(scalar, gs, 0.1).hidden_weights.at(0, 0) ==
        doctest::Approx(0.95).epsilon(1e-15));

  auto bad = ModelParams::zeros(2, 2, 2);
  CHECK_THROWS_AS(sgd_step(p, bad, 0.1), std::invalid_argument);
}

TEST_CASE("train_local: single batch, single epoch equals one sgd step") {
  const auto p = ModelParams::random_init(2, 4, 3, 11);
  const auto set = make_set({{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}}, {0, 1, 2});
  TrainConfig cfg{.learning_rate = 0.1, .batch_size = 8, .local_epochs = 1, .rng_seed = 3};
  const auto trained = train_local(p, set, cfg);
  const auto manual = sgd_step(p, backward(p, set), 0.1);
  CHECK(trained == manual);
}

TEST_CASE("train_local: deterministic per seed") {
  const auto p = ModelParams::random_init(2, 4, 2, 13);
  const auto set = make_set({{2.0, 0.1}, {-2.0, 0.2}, {2.1, -0.3}, {-1.9, 0.0}},
                            {0, 1, 0, 1});
  TrainConfig cfg{.learning_rate = 0.05, .batch_size = 2, .local_epochs = 5, .rng_seed = 42};
  CHECK(train_local(p, set, cfg) == train_local(p, set, cfg));
  TrainConfig other = cfg;
  other.rng_seed = 43;
  CHECK(train_local(p, set, cfg) != train_local(p, set, other));
}

TEST_CASE("train_local: empty labeled set is a no-op") {
  const auto p = ModelParams::random_init(2, 3, 2, 1);
  LabeledSet empty;
  empty.features = Matrix(0, 2);
  TrainConfig cfg{.learning_rate = 0.1, .batch_size = 4, .local_epochs = 2, .rng_seed = 0};
  CHECK(train_local(p, empty, cfg) == p);
}

TEST_CASE("train_local: separable blobs reach training accuracy 1") {
  const GaussianSpec spec = simplex_spec(2, 2, 6.0, 1.0);
  const auto data = generate_class_data(spec, {40, 40}, 99);
  auto p = ModelParams::random_init(2, 8, 2, 5);
  TrainConfig cfg{.learning_rate = 0.1, .batch_size = 10, .local_epochs = 60, .rng_seed = 7};
  p = train_local(p, data, cfg);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto tr = forward(p, data.features.row(i));
    std::size_t best = 0;
    for (std::size_t l = 1; l < 2; ++l)
      if (tr.probabilities[l] > tr.probabilities[best]) best = l;
    if (best == data.labels[i]) ++correct;
  }
  CHECK(correct == data.size());
  CHECK(p.finite());
}

TEST_CASE("output_row: round trip and row independence") {
  auto p = ModelParams::random_init(3, 4, 3, 17);
  CHECK(ModelParams::zeros(3, 4, 3).output_row(1) ==
        std::vector<double>(5, 0.0));

  const std::vector<double> v{1.0, 2.0, 3.0, 4.0, 5.0};
  const auto before_other = p.output_row(2);
  p.set_output_row(1, v);
  CHECK(p.output_row(1) == v);
  CHECK(p.output_row(2) == before_other);
  CHECK_THROWS_AS(p.output_row(3), std::invalid_argument);
}

TEST_CASE("same-class gradients more aligned than cross-class") {
  const GaussianSpec spec = simplex_spec(3, 8, 6.0, 0.5);
  std::size_t wins = 0;
  const std::size_t trials = 20;
  for (std::uint64_t seed = 1; seed <= trials; ++seed) {
    const auto p = ModelParams::random_init(8, 12, 3, mix_seed(seed, 1));
    const auto data = generate_class_data(spec, {2, 2, 2}, mix_seed(seed, 2));
    auto out_grad = [&](std::size_t i) {
      const auto g = backward(p, data, std::vector<std::size_t>{i});
      std::vector<double> v = g.output_weights.data;
      v.insert(v.end(), g.output_bias.begin(), g.output_bias.end());
      return v;
    };
    auto cosine = [](const std::vector<double>& a, const std::vector<double>& b) {
      return dot(a, b) / std::sqrt(dot(a, a) * dot(b, b));
    };
    // Samples 0,1 are class 0; 2,3 class 1; 4,5 class 2.
    const double same = cosine(out_grad(0), out_grad(1));
    const double cross = cosine(out_grad(0), out_grad(2));
    if (same > cross) ++wins;
  }
  CHECK(wins >= trials - 2);
}
