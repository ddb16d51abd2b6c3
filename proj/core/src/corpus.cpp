// SPDX-License-Identifier: Apache-2.0
#include <litmine/corpus.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace litmine::bench {

namespace {

constexpr std::size_t kSharedVocab = 2000;
constexpr std::size_t kTopicVocab = 300;
constexpr double kZipfExponent = 1.1;

const std::vector<std::string> kLabels = {
    "population_spread", "vaccine", "ppe_effectiveness", "risk_factors"};

const std::vector<std::string> kCountries = {
    "Australia", "United States", "China", "United Kingdom", "Germany", "India",
    "Brazil", "Japan", "France", "Italy", "Canada", "South Korea"};

// cumulative zipf weights for sampling by binary search
std::vector<double> zipf_cdf(std::size_t n) {
  std::vector<double> cdf(n);
  double total = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    total += 1.0 / std::pow(static_cast<double>(r + 1), kZipfExponent);
    cdf[r] = total;
  }
  for (double& v : cdf) v /= total;
  return cdf;
}

std::size_t sample_zipf(const std::vector<double>& cdf, std::mt19937_64& rng) {
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  return static_cast<std::size_t>(
      std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
}

const std::vector<double>& shared_cdf() {
  static const std::vector<double> cdf = zipf_cdf(kSharedVocab);
  return cdf;
}

const std::vector<double>& topic_cdf() {
  static const std::vector<double> cdf = zipf_cdf(kTopicVocab);
  return cdf;
}

std::string shared_word(std::size_t r) { return "word" + std::to_string(r); }

std::string topic_word(std::size_t topic, std::size_t r) {
  return kLabels[topic] + "term" + std::to_string(r);
}

}  // namespace

const std::vector<std::string>& corpus_labels() { return kLabels; }

ArticleDoc make_synthetic_doc(std::uint32_t seed, std::uint64_t i, std::string* label_out) {
  std::seed_seq seq{static_cast<std::uint64_t>(seed), i};
  std::mt19937_64 rng(seq);

  std::size_t topic = rng() % kLabels.size();
  if (label_out) *label_out = kLabels[topic];

  ArticleDoc doc;
  doc.source = "synthetic";
  doc.publish_time = "2020-07-27";

  doc.title = "study of " + topic_word(topic, sample_zipf(topic_cdf(), rng)) + " and " +
              topic_word(topic, sample_zipf(topic_cdf(), rng)) + " uid" + std::to_string(i);

  std::size_t n_tokens = 200 + rng() % 1801;
  std::size_t abstract_tokens = std::min<std::size_t>(30, n_tokens / 4);
  std::string text;
  text.reserve(n_tokens * 8);
  for (std::size_t t = 0; t < n_tokens; ++t) {
    if (t > 0) text += ' ';
    bool topical = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < 0.5;
    text += topical ? topic_word(topic, sample_zipf(topic_cdf(), rng))
                    : shared_word(sample_zipf(shared_cdf(), rng));
  }
  std::size_t split = 0;
  for (std::size_t t = 0, pos = 0; t < abstract_tokens; ++t) {
    pos = text.find(' ', pos);
    if (pos == std::string::npos) break;
    split = pos;
    ++pos;
  }
  doc.abstract_text = text.substr(0, split);
  doc.body_text = text.substr(split == 0 ? 0 : split + 1);

  std::size_t n_authors = 1 + rng() % 3;
  for (std::size_t a = 0; a < n_authors; ++a) {
    Author author;
    author.name = "Author " + std::to_string(rng() % 1000);
    author.country = kCountries[rng() % kCountries.size()];
    doc.authors.push_back(std::move(author));
  }
  return doc;
}

std::size_t gen_corpus(store::Store& store, std::size_t n, std::uint32_t seed) {
  std::size_t staged = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ArticleDoc doc = make_synthetic_doc(seed, i);
    std::string bytes = serialize_article(doc, "syn" + std::to_string(i));
    store.put_content(store::BucketId::staging, bytes, "json");
    ++staged;
  }
  return staged;
}

std::vector<ml::LabeledExample> gen_labeled(std::size_t n, std::uint32_t seed) {
  std::vector<ml::LabeledExample> out;
  out.reserve(n);
  // disjoint stream from corpus docs: offset the index space
  for (std::size_t i = 0; i < n; ++i) {
    std::string label;
    ArticleDoc doc = make_synthetic_doc(seed ^ 0x5eedu, 1'000'000 + i, &label);
    out.push_back({doc.title + " " + doc.abstract_text + " " + doc.body_text, label});
  }
  return out;
}

}  // namespace litmine::bench
