// SPDX-License-Identifier: Apache-2.0
#include <litmine/index.hpp>

#include <algorithm>
#include <cmath>
#include <mutex>

#include <json.hpp>

#include <litmine/errors.hpp>
#include <litmine/features.hpp>

namespace litmine::idx {

using nlohmann::json;

namespace {
const std::array<const char*, kFieldCount> kFieldNames = {"title", "abstract", "body_text"};
const std::array<double, kFieldCount> kFieldWeights = {kTitleBoost, 1.0, 1.0};
}  // namespace

std::string AnalyzedDoc::to_json() const {
  json fields_j = json::object();
  for (std::size_t f = 0; f < kFieldCount; ++f) {
    json tf = json::object();
    for (const auto& [term, count] : fields[f].tf) tf[term] = count;
    fields_j[kFieldNames[f]] = {{"tf", std::move(tf)}, {"len", fields[f].length}};
  }
  json j{{"doc_id", doc_id}, {"title", title}, {"category", category},
         {"countries", countries}, {"source", source}, {"fields", std::move(fields_j)}};
  if (publish_time) j["publish_time"] = *publish_time;
  return j.dump();
}

AnalyzedDoc AnalyzedDoc::from_json(std::string_view json_text) {
  json j = json::parse(json_text, nullptr, false);
  return from_parsed(j);
}

AnalyzedDoc AnalyzedDoc::from_parsed(const json& j) {
  if (j.is_discarded() || !j.is_object() || !j.contains("doc_id")) {
    throw format_error("analyzed doc: bad record");
  }
  AnalyzedDoc doc;
  doc.doc_id = j["doc_id"].get<std::string>();
  doc.title = j.value("title", "");
  doc.category = j.value("category", "");
  doc.source = j.value("source", "");
  if (j.contains("countries")) {
    doc.countries = j["countries"].get<std::vector<std::string>>();
  }
  if (j.contains("publish_time") && j["publish_time"].is_string()) {
    doc.publish_time = j["publish_time"].get<std::string>();
  }
  if (j.contains("fields") && j["fields"].is_object()) {
    for (std::size_t f = 0; f < kFieldCount; ++f) {
      if (!j["fields"].contains(kFieldNames[f])) continue;
      const json& fj = j["fields"][kFieldNames[f]];
      doc.fields[f].length = fj.value("len", 0u);
      if (fj.contains("tf")) {
        for (const auto& [term, count] : fj["tf"].items()) {
          doc.fields[f].tf[term] = count.get<std::uint32_t>();
        }
      }
    }
  }
  return doc;
}

AnalyzedDoc analyze(const IndexedDoc& doc) {
  AnalyzedDoc out;
  out.doc_id = doc.doc_id;
  out.title = doc.title;
  out.category = doc.category;
  out.countries = doc.countries;
  out.source = doc.source;
  out.publish_time = doc.publish_time;
  const std::array<const std::string*, kFieldCount> texts = {
      &doc.title, &doc.abstract_text, &doc.body_text};
  for (std::size_t f = 0; f < kFieldCount; ++f) {
    auto tokens = feat::tokenize(*texts[f]);
    out.fields[f].length = static_cast<std::uint32_t>(tokens.size());
    for (auto& t : tokens) ++out.fields[f].tf[t];
  }
  return out;
}

Index::Index(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
  segment_path_ = dir_ / "segments.jsonl";
  load_segment();
  segment_out_.open(segment_path_, std::ios::app);
  if (!segment_out_) throw io_error("cannot open segment file: " + segment_path_.string());
}

void Index::load_segment() {
  docs_.clear();
  id_to_ord_.clear();
  for (auto& p : postings_) p.clear();
  std::ifstream in(segment_path_);
  if (!in) return;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    insert_unlocked(AnalyzedDoc::from_json(line), /*visible=*/true);
  }
}

void Index::insert_unlocked(AnalyzedDoc doc, bool visible) {
  std::size_t ord = docs_.size();
  for (std::size_t f = 0; f < kFieldCount; ++f) {
    for (const auto& [term, tf] : doc.fields[f].tf) {
      postings_[f][term].emplace_back(ord, tf);
    }
    // tf lives on in the postings (and the segment file); dropping the map
    // here keeps resident memory per doc small and flat
    doc.fields[f].tf.clear();
  }
  id_to_ord_[doc.doc_id] = ord;  // upsert: newest version wins
  docs_.push_back({std::move(doc), visible});
}

bool Index::is_current(std::size_t ord) const {
  auto it = id_to_ord_.find(docs_[ord].doc.doc_id);
  return it != id_to_ord_.end() && it->second == ord && docs_[ord].visible;
}

void Index::add(AnalyzedDoc doc, std::string_view segment_line) {
  std::unique_lock lock(mu_);
  if (segment_line.empty()) {
    segment_out_ << doc.to_json() << '\n';
  } else {
    segment_out_ << segment_line << '\n';
  }
  if (!segment_out_) throw io_error("segment append failed: " + segment_path_.string());
  insert_unlocked(std::move(doc), /*visible=*/false);
}

void Index::commit() {
  std::unique_lock lock(mu_);
  segment_out_.flush();
  if (!segment_out_) throw io_error("segment flush failed: " + segment_path_.string());
  for (auto& entry : docs_) entry.visible = true;
}

std::size_t Index::doc_count() const {
  std::shared_lock lock(mu_);
  std::size_t n = 0;
  for (const auto& [id, ord] : id_to_ord_) {
    if (docs_[ord].visible) ++n;
  }
  return n;
}

std::vector<std::pair<std::string, std::string>> Index::category_map() const {
  std::shared_lock lock(mu_);
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [id, ord] : id_to_ord_) {
    if (docs_[ord].visible) out.emplace_back(id, docs_[ord].doc.category);
  }
  lock.unlock();
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<SearchHit> Index::search(std::string_view query, std::size_t limit) const {
  if (limit < 1) throw validation_error("search limit must be >= 1");
  auto terms = feat::tokenize(query);
  std::sort(terms.begin(), terms.end());
  terms.erase(std::unique(terms.begin(), terms.end()), terms.end());

  std::shared_lock lock(mu_);
  std::size_t n_docs = 0;
  std::array<double, kFieldCount> total_len{};
  for (const auto& [id, ord] : id_to_ord_) {
    if (!docs_[ord].visible) continue;
    ++n_docs;
    for (std::size_t f = 0; f < kFieldCount; ++f) {
      total_len[f] += docs_[ord].doc.fields[f].length;
    }
  }
  if (n_docs == 0 || terms.empty()) return {};
  std::array<double, kFieldCount> avg_len{};
  for (std::size_t f = 0; f < kFieldCount; ++f) {
    avg_len[f] = total_len[f] / static_cast<double>(n_docs);
  }

  std::unordered_map<std::size_t, double> scores;
  for (const auto& term : terms) {
    for (std::size_t f = 0; f < kFieldCount; ++f) {
      auto it = postings_[f].find(term);
      if (it == postings_[f].end()) continue;
      std::size_t df = 0;
      for (const auto& [ord, tf] : it->second) {
        if (is_current(ord)) ++df;
      }
      if (df == 0) continue;
      double idf = std::log(1.0 + (static_cast<double>(n_docs) - static_cast<double>(df) + 0.5) /
                                      (static_cast<double>(df) + 0.5));
      for (const auto& [ord, tf] : it->second) {
        if (!is_current(ord)) continue;
        double len = docs_[ord].doc.fields[f].length;
        double denom = tf + kBm25K1 * (1.0 - kBm25B + kBm25B * (avg_len[f] > 0 ? len / avg_len[f] : 0.0));
        double s = idf * (tf * (kBm25K1 + 1.0)) / denom;
        scores[ord] += kFieldWeights[f] * s;
      }
    }
  }

  std::vector<SearchHit> hits;
  hits.reserve(scores.size());
  for (const auto& [ord, score] : scores) {
    hits.push_back({docs_[ord].doc.doc_id, score, docs_[ord].doc.title});
  }
  std::sort(hits.begin(), hits.end(), [](const SearchHit& a, const SearchHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.doc_id < b.doc_id;
  });
  if (hits.size() > limit) hits.resize(limit);
  return hits;
}

AggregationResult Index::aggregate(std::string_view field, std::size_t top_k) const {
  if (field != "category" && field != "countries" && field != "source") {
    throw validation_error("aggregate: unknown field " + std::string(field));
  }
  std::shared_lock lock(mu_);
  std::map<std::string, std::uint64_t> counts;
  for (const auto& [id, ord] : id_to_ord_) {
    if (!docs_[ord].visible) continue;
    const AnalyzedDoc& d = docs_[ord].doc;
    if (field == "category") {
      if (!d.category.empty()) ++counts[d.category];
    } else if (field == "source") {
      if (!d.source.empty()) ++counts[d.source];
    } else {
      for (const auto& c : d.countries) ++counts[c];
    }
  }
  AggregationResult out;
  out.field = std::string(field);
  out.buckets.assign(counts.begin(), counts.end());
  std::sort(out.buckets.begin(), out.buckets.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (out.buckets.size() > top_k) out.buckets.resize(top_k);
  return out;
}

void Index::wipe() {
  std::unique_lock lock(mu_);
  segment_out_.close();
  std::ofstream truncate(segment_path_, std::ios::trunc);
  truncate.close();
  docs_.clear();
  id_to_ord_.clear();
  for (auto& p : postings_) p.clear();
  segment_out_.open(segment_path_, std::ios::app);
  if (!segment_out_) throw io_error("cannot reopen segment file: " + segment_path_.string());
}

}  // namespace litmine::idx
