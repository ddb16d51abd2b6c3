// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace litmine::idx {

// BM25 parameters and field weighting are fixed; tests pin them.
constexpr double kBm25K1 = 1.2;
constexpr double kBm25B = 0.75;
constexpr double kTitleBoost = 2.0;

enum class Field : std::size_t { title = 0, abstract = 1, body_text = 2 };
constexpr std::size_t kFieldCount = 3;

struct IndexedDoc {
  std::string doc_id;  // article sha, 40-hex
  std::string title;
  std::string abstract_text;
  std::string body_text;
  std::string category;  // predicted label
  std::vector<std::string> countries;
  std::string source;
  std::optional<std::string> publish_time;
};

// Pre-tokenized form: term frequencies and length per analyzed field. This is
// what crosses the wire from workers and what segments persist, so the master
// never re-tokenizes article bodies.
struct AnalyzedField {
  std::map<std::string, std::uint32_t> tf;
  std::uint32_t length = 0;
};

struct AnalyzedDoc {
  std::string doc_id;
  std::string title;  // verbatim, for snippets
  std::string category;
  std::vector<std::string> countries;
  std::string source;
  std::optional<std::string> publish_time;
  std::array<AnalyzedField, kFieldCount> fields;

  std::string to_json() const;
  static AnalyzedDoc from_json(std::string_view json_text);
  static AnalyzedDoc from_parsed(const nlohmann::json& j);
};

/// Tokenizes with the same cleaner the classifier uses, so index and model
/// agree on token boundaries.
AnalyzedDoc analyze(const IndexedDoc& doc);

struct SearchHit {
  std::string doc_id;
  double score = 0.0;
  std::string title;
};

struct AggregationResult {
  std::string field;
  std::vector<std::pair<std::string, std::uint64_t>> buckets;  // (count desc, key asc)
};

// Embedded inverted index with exact terms aggregations.
//
// Persistence is an append-only segment file replayed on open. Writes become
// visible at commit(), not per document (read-your-batch). Upsert by doc_id:
// re-adding a sha replaces the previous version.
//
// Concurrency: one writer, any number of readers.
class Index {
public:
  explicit Index(std::filesystem::path dir);

  /// `segment_line`, when given, must be `doc` serialized by to_json(); it is
  /// appended verbatim, sparing a re-serialization on the hot ingest path.
  void add(AnalyzedDoc doc, std::string_view segment_line = {});
  void index_doc(const IndexedDoc& doc) { add(analyze(doc)); }

  /// Makes every add() since the last commit visible and flushes the segment.
  void commit();

  std::vector<SearchHit> search(std::string_view query, std::size_t limit) const;
  AggregationResult aggregate(std::string_view field, std::size_t top_k) const;

  /// Visible documents.
  std::size_t doc_count() const;

  /// (doc_id, category) for every visible doc, sorted by doc_id.
  std::vector<std::pair<std::string, std::string>> category_map() const;

  /// Writes a self-contained archive (manifest + segment + CRC32 trailer).
  void snapshot(const std::filesystem::path& dst) const;

  /// Replaces this index with the snapshot's contents. Refuses to overwrite a
  /// non-empty index unless `force`; a corrupt snapshot leaves it untouched.
  void restore(const std::filesystem::path& src, bool force = false);

  void wipe();

  const std::filesystem::path& dir() const { return dir_; }

private:
  struct DocEntry {
    AnalyzedDoc doc;
    bool visible = false;
  };

  void insert_unlocked(AnalyzedDoc doc, bool visible);
  bool is_current(std::size_t ord) const;  // caller holds the lock
  void load_segment();

  std::filesystem::path dir_;
  std::filesystem::path segment_path_;
  mutable std::shared_mutex mu_;
  std::vector<DocEntry> docs_;
  std::unordered_map<std::string, std::size_t> id_to_ord_;  // live version
  // per field: term -> (doc ord, tf); stale ords filtered at read time
  std::array<std::unordered_map<std::string, std::vector<std::pair<std::size_t, std::uint32_t>>>,
             kFieldCount> postings_;
  std::ofstream segment_out_;
};

}  // namespace litmine::idx
