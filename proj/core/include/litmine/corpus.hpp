// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <litmine/article.hpp>
#include <litmine/classifier.hpp>
#include <litmine/store.hpp>

namespace litmine::bench {

// The four topic labels the synthetic generator correlates vocabulary with.
const std::vector<std::string>& corpus_labels();

/// Deterministic synthetic article: zipfian shared vocabulary plus a
/// label-correlated topic vocabulary, 200-2000 body tokens. Doc `i` depends
/// only on (seed, i), so corpora for growing n nest.
ArticleDoc make_synthetic_doc(std::uint32_t seed, std::uint64_t i, std::string* label_out = nullptr);

/// Serializes and stages n synthetic docs; returns the number of staging
/// objects written (== n, keys are content-unique by construction).
std::size_t gen_corpus(store::Store& store, std::size_t n, std::uint32_t seed);

/// Labeled examples drawn from the same generator, for training the demo model.
std::vector<ml::LabeledExample> gen_labeled(std::size_t n, std::uint32_t seed);

}  // namespace litmine::bench
