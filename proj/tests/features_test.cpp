// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include <litmine/features.hpp>

using namespace litmine;

TEST_CASE("clean_text keeps [a-z0-9], lowercases and collapses whitespace") {
  CHECK(feat::clean_text("Hello, World!") == "hello world");
  CHECK(feat::clean_text("  A  B\t\nC  ") == "a b c");
  CHECK(feat::clean_text("COVID-19 (2020)") == "covid 19 2020");
  CHECK(feat::clean_text("") == "");
  CHECK(feat::clean_text("!!!") == "");
  // idempotent
  CHECK(feat::clean_text(feat::clean_text("Mixed CASE, again...")) ==
        feat::clean_text("Mixed CASE, again..."));
}

TEST_CASE("tokenize splits cleaned text") {
  CHECK(feat::tokenize("The cat; sat.") ==
        std::vector<std::string>{"the", "cat", "sat"});
  CHECK(feat::tokenize("").empty());
}

TEST_CASE("hash_token matches frozen reference values") {
  // seeded 64-bit FNV-1a (seed ^ offset basis, prime 0x100000001b3)
  // reduced mod 2^18, recomputed independently
  CHECK(feat::hash_token("vaccine") == 45519);
  CHECK(feat::hash_token("the") == 103079);
  CHECK(feat::hash_token("a") == 243919);
  CHECK(feat::hash_token("covid19") == 88655);
  CHECK(feat::hash_token("x") == 240004);
  CHECK(feat::hash_token("vaccine") < feat::kFeatureDims);
}

TEST_CASE("featurize_text: TF counts, sorted indices, unit L2 norm") {
  auto v = feat::featurize_text("The cat sat, the!");
  // tokens: the(x2), cat, sat -> 3 distinct buckets, norm sqrt(6)
  REQUIRE(v.nnz() == 3);
  CHECK(std::is_sorted(v.indices.begin(), v.indices.end()));
  double norm_sq = 0;
  double max_val = 0;
  for (double x : v.values) {
    norm_sq += x * x;
    max_val = std::max(max_val, x);
  }
  CHECK(norm_sq == doctest::Approx(1.0).epsilon(1e-12));
  // 2/sqrt(6)
  CHECK(max_val == doctest::Approx(0.8164965809277261).epsilon(1e-12));
  // the doubled token lands in the bucket for "the"
  auto it = std::find(v.indices.begin(), v.indices.end(), 103079u);
  REQUIRE(it != v.indices.end());
  CHECK(v.values[static_cast<std::size_t>(it - v.indices.begin())] ==
        doctest::Approx(0.8164965809277261).epsilon(1e-12));
}

TEST_CASE("featurize is deterministic and empty docs give empty vectors") {
  ArticleDoc doc;
  doc.title = "Vaccine efficacy";
  doc.abstract_text = "A study of vaccines.";
  doc.body_text = "Results were significant.";
  auto a = feat::featurize(doc);
  auto b = feat::featurize(doc);
  CHECK(a.indices == b.indices);
  CHECK(a.values == b.values);
  CHECK_FALSE(a.empty());

  ArticleDoc empty;
  CHECK(feat::featurize(empty).empty());
  CHECK(feat::featurize_text("...!?").empty());
}

TEST_CASE("featurize merges title, abstract and body into one bag") {
  ArticleDoc doc;
  doc.title = "alpha";
  doc.body_text = "alpha";
  auto v = feat::featurize(doc);
  REQUIRE(v.nnz() == 1);
  CHECK(v.values[0] == doctest::Approx(1.0));  // tf=2 normalizes to 1
  CHECK(v.indices[0] == feat::hash_token("alpha"));
}
