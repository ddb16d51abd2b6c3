// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <litmine/article.hpp>
#include <litmine/features.hpp>
#include <litmine/store.hpp>

namespace litmine::ml {

struct LabeledExample {
  std::string text;
  std::string label;
};

// Multiclass maximum-entropy (multinomial logistic regression) model.
// Weights are dense in memory, row per label; persisted sparse (CSR).
// Immutable once trained; safe to share across concurrent predictors.
struct ModelArtifact {
  std::vector<std::string> labels;                 // unique, order fixed at training
  std::vector<std::vector<double>> weights;        // labels.size() x feat::kFeatureDims
  std::vector<double> bias;                        // per label
  std::uint32_t feature_dims = feat::kFeatureDims;
  std::uint64_t hash_seed = feat::kHashSeed;
  double eval_accuracy = 0.0;                      // held-out split, never training
  std::uint64_t trained_at = 0;                    // unix seconds UTC
  std::string train_set_sha;                       // 40-hex over the training payload
};

struct Prediction {
  std::string label;
  std::vector<double> scores;  // softmax probabilities, sum to 1
};

struct TrainConfig {
  double l2 = 1e-4;
  std::size_t epochs = 30;
  std::uint32_t seed = 42;
};

/// L2-regularized multinomial cross-entropy objective:
///   (1/n) sum_i -log softmax(W x_i + b)[y_i]  +  (l2/2) ||W||^2
/// Bias is unregularized. `ys` holds label indices into the weight rows.
double objective(const std::vector<feat::FeatureVector>& xs,
                 const std::vector<std::size_t>& ys,
                 const std::vector<std::vector<double>>& weights,
                 const std::vector<double>& bias, double l2);

/// Analytic gradient of `objective` w.r.t. weights and bias.
void gradient(const std::vector<feat::FeatureVector>& xs,
              const std::vector<std::size_t>& ys,
              const std::vector<std::vector<double>>& weights,
              const std::vector<double>& bias, double l2,
              std::vector<std::vector<double>>& grad_w,
              std::vector<double>& grad_b);

/// Trains by seeded stochastic gradient descent on the convex objective.
/// Deterministic given (examples, config). An 80/20 stratified split derived
/// from config.seed provides the held-out eval_accuracy.
/// Throws Validation on empty input or fewer than two distinct labels.
ModelArtifact train(const std::vector<LabeledExample>& examples, const TrainConfig& config = {});

Prediction predict(const ModelArtifact& model, const ArticleDoc& doc);
Prediction predict_features(const ModelArtifact& model, const feat::FeatureVector& x);

/// Returns the model with the higher eval_accuracy; the incumbent wins ties.
/// Throws Validation when label sets differ.
const ModelArtifact& select_model(const ModelArtifact& candidate,
                                  const std::optional<ModelArtifact>& incumbent);

// --- persistence (versioned binary, magic "LMML", trailing CRC32) ---

std::string serialize_model(const ModelArtifact& m);
ModelArtifact deserialize_model(std::string_view bytes);

/// Stores the serialized model in the ml_models bucket under sha1(bytes)+".model".
store::ObjectRef save_model(store::Store& store, const ModelArtifact& m);
ModelArtifact load_model(const store::Store& store, std::string_view key);

/// One-line pointer naming the key of the model in service.
void set_current_model(store::Store& store, std::string_view key);
std::optional<std::string> current_model_key(const store::Store& store);

/// select_model against the current pointer, persist the winner, repoint.
/// Returns the key now current.
std::string install_model(store::Store& store, const ModelArtifact& candidate);

/// JSON-lines training data: one {"text": str, "label": str} per line.
std::vector<LabeledExample> parse_training_data(std::string_view jsonl);
std::string serialize_training_data(const std::vector<LabeledExample>& examples);

}  // namespace litmine::ml
