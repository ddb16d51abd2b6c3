// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <litmine/article.hpp>

namespace litmine::feat {

// Fixed feature-hashing space shared by training, inference and the index
// analyzer. Changing either constant invalidates every stored model.
constexpr std::uint32_t kFeatureDims = 1u << 18;
constexpr std::uint64_t kHashSeed = 0x4c69744d696e6531ull;

/// Lowercases, replaces everything outside [a-z0-9] with spaces and collapses
/// whitespace runs. Idempotent; invalid UTF-8 bytes degrade to spaces.
std::string clean_text(std::string_view raw);

/// clean_text then split on single spaces.
std::vector<std::string> tokenize(std::string_view raw);

/// Seeded 64-bit FNV-1a, reduced mod kFeatureDims.
std::uint32_t hash_token(std::string_view token);

struct FeatureVector {
  // parallel arrays, indices strictly increasing
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  std::size_t nnz() const { return indices.size(); }
  bool empty() const { return indices.empty(); }
};

/// Unigram term frequencies over clean(title + abstract + body), hashed into
/// kFeatureDims buckets, L2-normalized. Pure; empty doc gives an empty vector.
FeatureVector featurize(const ArticleDoc& doc);

/// Same featurization applied to an arbitrary text string.
FeatureVector featurize_text(std::string_view text);

}  // namespace litmine::feat
