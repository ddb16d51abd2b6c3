// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <random>

#include <litmine/classifier.hpp>
#include <litmine/corpus.hpp>
#include <litmine/store.hpp>

using namespace litmine;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("litmine_ml_test_" +
                                                std::to_string(::getpid()) + "_" +
                                                std::to_string(counter()++))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

// small random problem over a handful of feature indices
struct Problem {
  std::vector<feat::FeatureVector> xs;
  std::vector<std::size_t> ys;
  std::vector<std::vector<double>> weights;
  std::vector<double> bias;
  std::vector<std::uint32_t> active;  // indices that carry weight/features
};

Problem make_problem(std::uint32_t seed, std::size_t n_examples, std::size_t n_classes) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Problem p;
  for (std::uint32_t i = 0; i < 12; ++i) p.active.push_back(i * 1013 % feat::kFeatureDims);
  std::sort(p.active.begin(), p.active.end());
  for (std::size_t i = 0; i < n_examples; ++i) {
    feat::FeatureVector x;
    for (std::uint32_t idx : p.active) {
      if (rng() % 3 == 0) continue;
      x.indices.push_back(idx);
      x.values.push_back(unif(rng));
    }
    p.xs.push_back(std::move(x));
    p.ys.push_back(rng() % n_classes);
  }
  p.weights.assign(n_classes, std::vector<double>(feat::kFeatureDims, 0.0));
  p.bias.assign(n_classes, 0.0);
  for (auto& row : p.weights) {
    for (std::uint32_t idx : p.active) row[idx] = unif(rng);
  }
  for (auto& b : p.bias) b = unif(rng);
  return p;
}

}  // namespace

TEST_CASE("analytic gradient agrees with central finite differences") {
  auto p = make_problem(11, 24, 3);
  const double l2 = 1e-3;
  std::vector<std::vector<double>> grad_w;
  std::vector<double> grad_b;
  ml::gradient(p.xs, p.ys, p.weights, p.bias, l2, grad_w, grad_b);

  const double h = 1e-6;
  double max_err = 0.0;
  for (std::size_t c = 0; c < p.weights.size(); ++c) {
    for (std::uint32_t idx : p.active) {
      double saved = p.weights[c][idx];
      p.weights[c][idx] = saved + h;
      double up = ml::objective(p.xs, p.ys, p.weights, p.bias, l2);
      p.weights[c][idx] = saved - h;
      double down = ml::objective(p.xs, p.ys, p.weights, p.bias, l2);
      p.weights[c][idx] = saved;
      max_err = std::max(max_err, std::abs((up - down) / (2 * h) - grad_w[c][idx]));
    }
    double saved = p.bias[c];
    p.bias[c] = saved + h;
    double up = ml::objective(p.xs, p.ys, p.weights, p.bias, l2);
    p.bias[c] = saved - h;
    double down = ml::objective(p.xs, p.ys, p.weights, p.bias, l2);
    p.bias[c] = saved;
    max_err = std::max(max_err, std::abs((up - down) / (2 * h) - grad_b[c]));
  }
  CHECK(max_err <= 1e-4);
}

TEST_CASE("training separates a linearly separable synthetic corpus") {
  auto examples = bench::gen_labeled(400, 123);
  auto model = ml::train(examples);
  CHECK(model.eval_accuracy >= 0.9);
  CHECK(model.labels.size() == 4);
  CHECK(std::is_sorted(model.labels.begin(), model.labels.end()));
  CHECK(model.feature_dims == feat::kFeatureDims);
  CHECK(model.train_set_sha.size() == 40);

  // the model gets its own training examples right
  std::size_t correct = 0;
  for (const auto& ex : examples) {
    if (ml::predict_features(model, feat::featurize_text(ex.text)).label == ex.label) ++correct;
  }
  CHECK(static_cast<double>(correct) / examples.size() >= 0.95);
}

TEST_CASE("training is deterministic for a fixed seed") {
  auto examples = bench::gen_labeled(120, 9);
  auto a = ml::train(examples);
  auto b = ml::train(examples);
  CHECK(a.eval_accuracy == b.eval_accuracy);
  CHECK(a.bias == b.bias);
  CHECK(a.weights == b.weights);
  ml::TrainConfig other;
  other.seed = 43;
  auto c = ml::train(examples, other);
  CHECK(c.weights != a.weights);  // different split/shuffle
}

TEST_CASE("train validates its input") {
  CHECK_THROWS_AS(ml::train({}), Error);
  std::vector<ml::LabeledExample> one_label = {{"text a", "l"}, {"text b", "l"}};
  CHECK_THROWS_AS(ml::train(one_label), Error);
}

TEST_CASE("a zero model yields a uniform softmax and the lowest label wins ties") {
  ml::ModelArtifact m;
  m.labels = {"alpha", "beta", "gamma"};
  m.weights.assign(3, std::vector<double>(feat::kFeatureDims, 0.0));
  m.bias.assign(3, 0.0);
  auto pred = ml::predict_features(m, feat::featurize_text("anything at all"));
  REQUIRE(pred.scores.size() == 3);
  double sum = 0;
  for (double s : pred.scores) {
    CHECK(s == doctest::Approx(1.0 / 3).epsilon(1e-12));
    sum += s;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pred.label == "alpha");
}

TEST_CASE("select_model keeps the incumbent unless strictly better") {
  ml::ModelArtifact inc;
  inc.labels = {"a", "b"};
  inc.eval_accuracy = 0.8;
  ml::ModelArtifact cand = inc;
  std::optional<ml::ModelArtifact> inc_opt = inc;

  cand.eval_accuracy = 0.8;  // tie -> incumbent
  CHECK(&ml::select_model(cand, inc_opt) == &*inc_opt);
  cand.eval_accuracy = 0.81;
  CHECK(&ml::select_model(cand, inc_opt) == &cand);
  cand.eval_accuracy = 0.5;
  CHECK(&ml::select_model(cand, inc_opt) == &*inc_opt);
  CHECK(&ml::select_model(cand, std::nullopt) == &cand);

  ml::ModelArtifact other = inc;
  other.labels = {"a", "c"};
  CHECK_THROWS_AS(ml::select_model(other, inc_opt), Error);
}

TEST_CASE("model serialization round trips exactly") {
  auto examples = bench::gen_labeled(120, 5);
  auto model = ml::train(examples);
  std::string bytes = ml::serialize_model(model);
  auto back = ml::deserialize_model(bytes);
  CHECK(back.labels == model.labels);
  CHECK(back.bias == model.bias);
  CHECK(back.weights == model.weights);
  CHECK(back.feature_dims == model.feature_dims);
  CHECK(back.hash_seed == model.hash_seed);
  CHECK(back.eval_accuracy == model.eval_accuracy);
  CHECK(back.trained_at == model.trained_at);
  CHECK(back.train_set_sha == model.train_set_sha);
  // byte-stable: serializing the deserialized model is identical
  CHECK(ml::serialize_model(back) == bytes);
}

TEST_CASE("model deserialization rejects corruption with clear errors") {
  auto examples = bench::gen_labeled(80, 3);
  auto model = ml::train(examples);
  std::string bytes = ml::serialize_model(model);

  SUBCASE("bad magic") {
    std::string bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS_AS(ml::deserialize_model(bad), Error);
  }
  SUBCASE("unknown version") {
    std::string bad = bytes;
    bad[4] = 99;
    CHECK_THROWS_AS(ml::deserialize_model(bad), Error);
  }
  SUBCASE("truncated") {
    CHECK_THROWS_AS(ml::deserialize_model(std::string_view(bytes).substr(0, bytes.size() / 2)),
                    Error);
    CHECK_THROWS_AS(ml::deserialize_model(std::string_view(bytes).substr(0, 3)), Error);
  }
  SUBCASE("flipped payload byte fails the checksum") {
    std::string bad = bytes;
    bad[bytes.size() / 2] = static_cast<char>(bad[bytes.size() / 2] ^ 0x5a);
    CHECK_THROWS_AS(ml::deserialize_model(bad), Error);
  }
}

TEST_CASE("install_model persists the winner and repoints current") {
  TempDir tmp;
  store::Store s(tmp.path);
  CHECK_FALSE(ml::current_model_key(s).has_value());

  auto examples = bench::gen_labeled(200, 21);
  auto trained = ml::train(examples);
  REQUIRE(trained.eval_accuracy > 0.6);

  auto first = trained;
  first.eval_accuracy = 0.6;  // leave headroom for a better candidate
  std::string key1 = ml::install_model(s, first);
  REQUIRE(ml::current_model_key(s).has_value());
  CHECK(*ml::current_model_key(s) == key1);
  auto loaded = ml::load_model(s, key1);
  CHECK(loaded.eval_accuracy == first.eval_accuracy);

  // a strictly worse candidate leaves the pointer alone
  auto worse = trained;
  worse.eval_accuracy = 0.0;
  std::string key2 = ml::install_model(s, worse);
  CHECK(key2 == key1);
  CHECK(*ml::current_model_key(s) == key1);

  // a strictly better candidate takes over
  std::string key3 = ml::install_model(s, trained);
  CHECK(key3 != key1);
  CHECK(*ml::current_model_key(s) == key3);
}

TEST_CASE("training data jsonl round trips") {
  std::vector<ml::LabeledExample> examples = {
      {"masks and \"quotes\"", "ppe_effectiveness"},
      {"spread\nacross lines", "population_spread"},
  };
  auto back = ml::parse_training_data(ml::serialize_training_data(examples));
  REQUIRE(back.size() == 2);
  CHECK(back[0].text == examples[0].text);
  CHECK(back[0].label == examples[0].label);
  CHECK(back[1].text == examples[1].text);
  CHECK_THROWS_AS(ml::parse_training_data("{not json}\n"), Error);
}
