// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

namespace litmine {

struct Author {
  std::string name;
  std::string country;  // empty when unknown; trimmed, title-cased
};

// One scholarly article, flattened from the per-article JSON file.
// `sha` is the SHA1 of the originating file's bytes, set at parse time.
struct ArticleDoc {
  std::string sha;
  std::string title;
  std::string abstract_text;
  std::string body_text;
  std::vector<Author> authors;
  std::optional<std::string> publish_time;
  std::string source;

  bool empty() const {
    return title.empty() && abstract_text.empty() && body_text.empty();
  }

  std::vector<std::string> countries() const;
};

/// Parses a per-article JSON file:
///   {"paper_id": str,
///    "metadata": {"title": str, "authors": [{"first","last","affiliation":{"country"}}]},
///    "abstract": [{"text": str}], "body_text": [{"text": str}]}
/// Throws Format on unparseable input, Validation when all text fields are empty.
/// `sha` is computed from `bytes`.
ArticleDoc parse_article(std::string_view bytes, std::string_view source = "");

/// Serializes back to the same file shape with deterministic field order.
std::string serialize_article(const ArticleDoc& doc, std::string_view paper_id = "");

/// Trim whitespace, then title-case each word ("united STATES" -> "United States").
std::string normalize_country(std::string_view raw);

}  // namespace litmine
