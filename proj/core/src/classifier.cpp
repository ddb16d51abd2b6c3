// SPDX-License-Identifier: Apache-2.0
#include <litmine/classifier.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include <litmine/errors.hpp>
#include <litmine/sha1.hpp>

namespace litmine::ml {

namespace {

std::vector<double> raw_scores(const std::vector<std::vector<double>>& weights,
                               const std::vector<double>& bias,
                               const feat::FeatureVector& x) {
  std::size_t c_count = weights.size();
  std::vector<double> scores(bias);
  for (std::size_t c = 0; c < c_count; ++c) {
    const auto& row = weights[c];
    double dot = 0.0;
    for (std::size_t k = 0; k < x.indices.size(); ++k) {
      dot += row[x.indices[k]] * x.values[k];
    }
    scores[c] += dot;
  }
  return scores;
}

void softmax_inplace(std::vector<double>& scores) {
  double max = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double& s : scores) {
    s = std::exp(s - max);
    sum += s;
  }
  for (double& s : scores) s /= sum;
}

std::size_t argmax_lowest_tie(const std::vector<double>& scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

}  // namespace

double objective(const std::vector<feat::FeatureVector>& xs,
                 const std::vector<std::size_t>& ys,
                 const std::vector<std::vector<double>>& weights,
                 const std::vector<double>& bias, double l2) {
  double loss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::vector<double> scores = raw_scores(weights, bias, xs[i]);
    double max = *std::max_element(scores.begin(), scores.end());
    double log_sum = 0.0;
    for (double s : scores) log_sum += std::exp(s - max);
    log_sum = max + std::log(log_sum);
    loss += log_sum - scores[ys[i]];
  }
  loss /= static_cast<double>(xs.size());
  double reg = 0.0;
  for (const auto& row : weights) {
    for (double w : row) reg += w * w;
  }
  return loss + 0.5 * l2 * reg;
}

void gradient(const std::vector<feat::FeatureVector>& xs,
              const std::vector<std::size_t>& ys,
              const std::vector<std::vector<double>>& weights,
              const std::vector<double>& bias, double l2,
              std::vector<std::vector<double>>& grad_w,
              std::vector<double>& grad_b) {
  std::size_t c_count = weights.size();
  grad_w.assign(c_count, std::vector<double>(weights[0].size(), 0.0));
  grad_b.assign(c_count, 0.0);
  double inv_n = 1.0 / static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::vector<double> p = raw_scores(weights, bias, xs[i]);
    softmax_inplace(p);
    for (std::size_t c = 0; c < c_count; ++c) {
      double g = (p[c] - (c == ys[i] ? 1.0 : 0.0)) * inv_n;
      grad_b[c] += g;
      for (std::size_t k = 0; k < xs[i].indices.size(); ++k) {
        grad_w[c][xs[i].indices[k]] += g * xs[i].values[k];
      }
    }
  }
  for (std::size_t c = 0; c < c_count; ++c) {
    for (std::size_t j = 0; j < weights[c].size(); ++j) {
      grad_w[c][j] += l2 * weights[c][j];
    }
  }
}

ModelArtifact train(const std::vector<LabeledExample>& examples, const TrainConfig& config) {
  if (examples.empty()) throw validation_error("train: no examples");

  std::map<std::string, std::size_t> label_index;
  for (const auto& ex : examples) label_index.emplace(ex.label, 0);
  if (label_index.size() < 2) throw validation_error("train: need at least 2 distinct labels");
  std::vector<std::string> labels;
  labels.reserve(label_index.size());
  for (auto& [name, idx] : label_index) {
    idx = labels.size();
    labels.push_back(name);
  }
  std::size_t c_count = labels.size();

  std::vector<feat::FeatureVector> xs(examples.size());
  std::vector<std::size_t> ys(examples.size());
  std::string payload;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    xs[i] = feat::featurize_text(examples[i].text);
    ys[i] = label_index[examples[i].label];
    payload += examples[i].label;
    payload += '\x1f';
    payload += examples[i].text;
    payload += '\x1e';
  }

  // stratified 80/20 split, derived from the seed
  std::mt19937 split_rng(config.seed);
  std::vector<std::size_t> train_idx, eval_idx;
  {
    std::vector<std::vector<std::size_t>> by_label(c_count);
    for (std::size_t i = 0; i < examples.size(); ++i) by_label[ys[i]].push_back(i);
    for (auto& group : by_label) {
      std::shuffle(group.begin(), group.end(), split_rng);
      std::size_t n_eval = group.size() / 5;
      for (std::size_t k = 0; k < group.size(); ++k) {
        (k < n_eval ? eval_idx : train_idx).push_back(group[k]);
      }
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(eval_idx.begin(), eval_idx.end());
  }

  // SGD on the primal. L2 shrinkage applied through a scale factor so each
  // step only touches the example's nonzero features.
  ModelArtifact model;
  model.labels = labels;
  model.weights.assign(c_count, std::vector<double>(feat::kFeatureDims, 0.0));
  model.bias.assign(c_count, 0.0);

  double scale = 1.0;
  std::mt19937 sgd_rng(config.seed + 0x9e3779b9u);
  std::vector<std::size_t> order = train_idx;
  const double eta0 = 1.0;
  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), sgd_rng);
    for (std::size_t i : order) {
      double lr = eta0 / (1.0 + eta0 * config.l2 * static_cast<double>(t));
      ++t;
      std::vector<double> p(model.bias);
      for (std::size_t c = 0; c < c_count; ++c) {
        const auto& row = model.weights[c];
        double dot = 0.0;
        for (std::size_t k = 0; k < xs[i].indices.size(); ++k) {
          dot += row[xs[i].indices[k]] * xs[i].values[k];
        }
        p[c] += scale * dot;
      }
      softmax_inplace(p);
      scale *= (1.0 - lr * config.l2);
      for (std::size_t c = 0; c < c_count; ++c) {
        double g = p[c] - (c == ys[i] ? 1.0 : 0.0);
        model.bias[c] -= lr * g;
        double step = lr * g / scale;
        auto& row = model.weights[c];
        for (std::size_t k = 0; k < xs[i].indices.size(); ++k) {
          row[xs[i].indices[k]] -= step * xs[i].values[k];
        }
      }
      if (scale < 1e-9) {
        for (auto& row : model.weights) {
          for (double& w : row) w *= scale;
        }
        scale = 1.0;
      }
    }
  }
  if (scale != 1.0) {
    for (auto& row : model.weights) {
      for (double& w : row) w *= scale;
    }
  }

  std::size_t correct = 0;
  for (std::size_t i : eval_idx) {
    std::vector<double> p = raw_scores(model.weights, model.bias, xs[i]);
    if (argmax_lowest_tie(p) == ys[i]) ++correct;
  }
  model.eval_accuracy = eval_idx.empty()
                            ? 0.0
                            : static_cast<double>(correct) / static_cast<double>(eval_idx.size());
  model.trained_at = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::seconds>(
          std::chrono::system_clock::now().time_since_epoch()).count());
  model.train_set_sha = sha1_hex(payload);
  return model;
}

Prediction predict_features(const ModelArtifact& model, const feat::FeatureVector& x) {
  for (std::uint32_t idx : x.indices) {
    if (idx >= model.feature_dims) {
      throw validation_error("predict: feature index exceeds model dims");
    }
  }
  std::vector<double> scores = raw_scores(model.weights, model.bias, x);
  softmax_inplace(scores);
  std::size_t best = argmax_lowest_tie(scores);
  return {model.labels[best], std::move(scores)};
}

Prediction predict(const ModelArtifact& model, const ArticleDoc& doc) {
  if (model.feature_dims != feat::kFeatureDims) {
    throw validation_error("predict: model feature dims do not match featurizer");
  }
  return predict_features(model, feat::featurize(doc));
}

const ModelArtifact& select_model(const ModelArtifact& candidate,
                                  const std::optional<ModelArtifact>& incumbent) {
  if (!incumbent) return candidate;
  if (incumbent->labels != candidate.labels) {
    throw validation_error("select_model: label sets differ; manual migration required");
  }
  return candidate.eval_accuracy > incumbent->eval_accuracy ? candidate : *incumbent;
}

}  // namespace litmine::ml
