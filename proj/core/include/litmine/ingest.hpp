// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <litmine/article.hpp>
#include <litmine/store.hpp>

namespace litmine::ingest {

struct MetadataRow {
  std::string record_id;
  std::optional<std::string> sha;  // 40-hex when present
  std::string title;
  std::string abstract_text;
  std::optional<std::string> publish_time;
  std::string authors_raw;  // "Last, First; Last, First"
  std::string source;
};

struct Reject {
  std::string record_id;  // may be empty when the id itself is missing
  std::string reason;
};

struct ParseResult {
  std::vector<MetadataRow> rows;
  std::vector<Reject> rejects;
};

struct IngestReport {
  std::uint64_t seen = 0;
  std::uint64_t new_count = 0;
  std::uint64_t skipped_existing = 0;
  std::uint64_t rejected = 0;
  std::uint64_t elapsed_ms = 0;
  std::optional<std::string> error;

  std::string to_json() const;
};

/// Parses the metadata CSV (columns: record_id,sha,title,abstract,
/// publish_time,authors,source). Rows with an empty record_id or malformed
/// sha become rejects with reasons, not silent drops.
/// Throws Format when the header is missing or wrong.
ParseResult parse_metadata(std::string_view csv_text);

/// Rows whose sha is present in neither the staging nor the completed bucket.
/// Rows without a sha are always returned (they are hashed at ingest time).
std::vector<MetadataRow> diff_incremental(const store::Store& store,
                                          const std::vector<MetadataRow>& rows);

/// Validates the article file and stores its original bytes at
/// staging/<sha1(bytes)>.json. Throws Integrity when row.sha disagrees with
/// the computed sha; nothing is stored in that case.
store::ObjectRef ingest_article(store::Store& store, std::string_view file_bytes,
                                const MetadataRow& row);

/// Raw PDF bytes land in raw/<sha>.pdf for a later extraction task.
store::ObjectRef enqueue_raw_pdf(store::Store& store, std::span<const std::byte> file_bytes);

/// Full workflow: parse, diff, then ingest each new row. Article files are
/// looked up as <articles_dir>/<record_id>.json; metadata-only rows are staged
/// as a minimal article synthesized from the row.
IngestReport run_ingest(store::Store& store, std::string_view metadata_csv,
                        const std::filesystem::path& articles_dir,
                        std::string_view source = "");

/// Synthesize an article file from a metadata-only row (empty body text).
std::string synthesize_article_file(const MetadataRow& row);

}  // namespace litmine::ingest
