// SPDX-License-Identifier: Apache-2.0
#include <litmine/article.hpp>

#include <algorithm>
#include <cctype>

#include <json.hpp>

#include <litmine/errors.hpp>
#include <litmine/sha1.hpp>

namespace litmine {

using nlohmann::json;

std::string normalize_country(std::string_view raw) {
  std::size_t b = 0, e = raw.size();
  while (b < e && std::isspace(static_cast<unsigned char>(raw[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(raw[e - 1]))) --e;
  std::string out(raw.substr(b, e - b));
  bool at_word_start = true;
  for (char& c : out) {
    unsigned char uc = static_cast<unsigned char>(c);
    if (std::isalpha(uc)) {
      c = static_cast<char>(at_word_start ? std::toupper(uc) : std::tolower(uc));
      at_word_start = false;
    } else {
      at_word_start = true;
    }
  }
  return out;
}

std::vector<std::string> ArticleDoc::countries() const {
  std::vector<std::string> out;
  for (const auto& a : authors) {
    if (!a.country.empty()) out.push_back(a.country);
  }
  return out;
}

namespace {

std::string join_paragraphs(const json& arr) {
  std::string out;
  if (!arr.is_array()) return out;
  for (const auto& p : arr) {
    if (!p.is_object() || !p.contains("text") || !p["text"].is_string()) continue;
    if (!out.empty()) out += ' ';
    out += p["text"].get<std::string>();
  }
  return out;
}

}  // namespace

ArticleDoc parse_article(std::string_view bytes, std::string_view source) {
  json j = json::parse(bytes, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw format_error("article file is not a JSON object");
  }
  ArticleDoc doc;
  doc.sha = sha1_hex(bytes);
  doc.source = std::string(source);
  if (j.contains("metadata") && j["metadata"].is_object()) {
    const json& meta = j["metadata"];
    if (meta.contains("title") && meta["title"].is_string()) {
      doc.title = meta["title"].get<std::string>();
    }
    if (meta.contains("authors") && meta["authors"].is_array()) {
      for (const auto& a : meta["authors"]) {
        if (!a.is_object()) continue;
        Author author;
        std::string first = a.value("first", "");
        std::string last = a.value("last", "");
        author.name = first.empty() ? last : (last.empty() ? first : first + " " + last);
        if (a.contains("affiliation") && a["affiliation"].is_object()) {
          author.country = normalize_country(a["affiliation"].value("country", ""));
        }
        doc.authors.push_back(std::move(author));
      }
    }
  }
  doc.abstract_text = join_paragraphs(j.value("abstract", json::array()));
  doc.body_text = join_paragraphs(j.value("body_text", json::array()));
  if (j.contains("publish_time") && j["publish_time"].is_string()) {
    std::string t = j["publish_time"].get<std::string>();
    if (!t.empty()) doc.publish_time = t;
  }
  if (doc.empty()) {
    throw validation_error("article has no title, abstract or body text");
  }
  return doc;
}

std::string serialize_article(const ArticleDoc& doc, std::string_view paper_id) {
  json authors = json::array();
  for (const auto& a : doc.authors) {
    json affiliation = json::object();
    affiliation["country"] = a.country;
    json author = json::object();
    auto space = a.name.find(' ');
    author["first"] = space == std::string::npos ? a.name : a.name.substr(0, space);
    author["last"] = space == std::string::npos ? "" : a.name.substr(space + 1);
    author["affiliation"] = std::move(affiliation);
    authors.push_back(std::move(author));
  }
  json j;
  j["paper_id"] = std::string(paper_id);
  j["metadata"] = {{"title", doc.title}, {"authors", std::move(authors)}};
  j["abstract"] = json::array({{{"text", doc.abstract_text}}});
  j["body_text"] = json::array({{{"text", doc.body_text}}});
  if (doc.publish_time) j["publish_time"] = *doc.publish_time;
  return j.dump();
}

}  // namespace litmine
