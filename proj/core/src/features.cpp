// SPDX-License-Identifier: Apache-2.0
#include <litmine/features.hpp>

#include <cmath>
#include <map>

namespace litmine::feat {

std::string clean_text(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char ch : raw) {
    unsigned char c = static_cast<unsigned char>(ch);
    char mapped;
    if (c >= 'a' && c <= 'z') mapped = static_cast<char>(c);
    else if (c >= 'A' && c <= 'Z') mapped = static_cast<char>(c - 'A' + 'a');
    else if (c >= '0' && c <= '9') mapped = static_cast<char>(c);
    else mapped = ' ';
    if (mapped == ' ') {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(mapped);
    }
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view raw) {
  std::string cleaned = clean_text(raw);
  std::vector<std::string> tokens;
  std::size_t start = 0;
  while (start < cleaned.size()) {
    std::size_t end = cleaned.find(' ', start);
    if (end == std::string::npos) end = cleaned.size();
    tokens.emplace_back(cleaned.substr(start, end - start));
    start = end + 1;
  }
  return tokens;
}

std::uint32_t hash_token(std::string_view token) {
  std::uint64_t h = kHashSeed ^ 0xcbf29ce484222325ull;
  for (char c : token) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return static_cast<std::uint32_t>(h & (kFeatureDims - 1));
}

FeatureVector featurize_text(std::string_view text) {
  std::map<std::uint32_t, double> counts;
  for (const auto& token : tokenize(text)) {
    counts[hash_token(token)] += 1.0;
  }
  FeatureVector v;
  v.indices.reserve(counts.size());
  v.values.reserve(counts.size());
  double norm_sq = 0.0;
  for (const auto& [idx, count] : counts) {
    v.indices.push_back(idx);
    v.values.push_back(count);
    norm_sq += count * count;
  }
  if (norm_sq > 0.0) {
    double inv = 1.0 / std::sqrt(norm_sq);
    for (double& val : v.values) val *= inv;
  }
  return v;
}

FeatureVector featurize(const ArticleDoc& doc) {
  std::string text = doc.title;
  text += ' ';
  text += doc.abstract_text;
  text += ' ';
  text += doc.body_text;
  return featurize_text(text);
}

}  // namespace litmine::feat
