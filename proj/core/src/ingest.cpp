// SPDX-License-Identifier: Apache-2.0
#include <litmine/ingest.hpp>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cctype>
#include <chrono>
#include <fstream>

#include <json.hpp>

#include <litmine/csv.hpp>
#include <litmine/errors.hpp>
#include <litmine/sha1.hpp>

namespace litmine::ingest {

using nlohmann::json;

namespace {

const std::vector<std::string> kHeader = {
    "record_id", "sha", "title", "abstract", "publish_time", "authors", "source"};

bool valid_sha(std::string_view s) {
  if (s.size() != 40) return false;
  for (char c : s) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Holds flock() on <root>/.ingest.lock for the duration of one ingest run.
class IngestLock {
public:
  explicit IngestLock(const std::filesystem::path& root) {
    path_ = root / ".ingest.lock";
    fd_ = ::open(path_.c_str(), O_CREAT | O_RDWR, 0644);
    if (fd_ < 0) throw io_error("cannot open lock file: " + path_.string());
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd_);
      fd_ = -1;
      throw conflict_error("another ingest run holds the lock: " + path_.string());
    }
  }
  ~IngestLock() {
    if (fd_ >= 0) {
      ::flock(fd_, LOCK_UN);
      ::close(fd_);
    }
  }
  IngestLock(const IngestLock&) = delete;
  IngestLock& operator=(const IngestLock&) = delete;

private:
  std::filesystem::path path_;
  int fd_ = -1;
};

}  // namespace

std::string IngestReport::to_json() const {
  json j{{"seen", seen},
         {"new", new_count},
         {"skipped_existing", skipped_existing},
         {"rejected", rejected},
         {"elapsed_ms", elapsed_ms}};
  if (error) j["error"] = *error;
  return j.dump();
}

ParseResult parse_metadata(std::string_view csv_text) {
  csv::Table table = csv::parse(csv_text);
  if (table.header != kHeader) {
    throw format_error("metadata csv: unexpected header");
  }
  ParseResult out;
  for (const auto& row : table.rows) {
    if (row.size() != kHeader.size()) {
      out.rejects.push_back({row.empty() ? "" : row[0], "wrong column count"});
      continue;
    }
    if (row[0].empty()) {
      out.rejects.push_back({"", "empty record_id"});
      continue;
    }
    MetadataRow m;
    m.record_id = row[0];
    if (!row[1].empty()) {
      if (!valid_sha(row[1])) {
        out.rejects.push_back({row[0], "malformed sha"});
        continue;
      }
      m.sha = row[1];
    }
    m.title = row[2];
    m.abstract_text = row[3];
    if (!row[4].empty()) m.publish_time = row[4];
    m.authors_raw = row[5];
    m.source = row[6];
    out.rows.push_back(std::move(m));
  }
  return out;
}

std::vector<MetadataRow> diff_incremental(const store::Store& store,
                                          const std::vector<MetadataRow>& rows) {
  std::vector<MetadataRow> fresh;
  for (const auto& row : rows) {
    if (row.sha) {
      std::string key = *row.sha + ".json";
      if (store.exists(store::BucketId::staging, key) ||
          store.exists(store::BucketId::completed, key)) {
        continue;
      }
    }
    fresh.push_back(row);
  }
  return fresh;
}

store::ObjectRef ingest_article(store::Store& store, std::string_view file_bytes,
                                const MetadataRow& row) {
  std::string computed = sha1_hex(file_bytes);
  if (row.sha && *row.sha != computed) {
    throw integrity_error("article " + row.record_id + ": file sha " + computed +
                          " does not match metadata sha " + *row.sha);
  }
  ArticleDoc doc = parse_article(file_bytes, row.source);  // validates schema
  (void)doc;
  return store.put(store::BucketId::staging, computed + ".json", file_bytes);
}

store::ObjectRef enqueue_raw_pdf(store::Store& store, std::span<const std::byte> file_bytes) {
  return store.put_content(store::BucketId::raw, file_bytes, "pdf");
}

std::string synthesize_article_file(const MetadataRow& row) {
  json authors = json::array();
  std::string_view raw = row.authors_raw;
  std::size_t start = 0;
  while (start <= raw.size() && !raw.empty()) {
    std::size_t end = raw.find(';', start);
    if (end == std::string_view::npos) end = raw.size();
    std::string part = trim(raw.substr(start, end - start));
    if (!part.empty()) {
      std::string first, last;
      auto comma = part.find(',');
      if (comma == std::string::npos) {
        first = part;
      } else {
        last = trim(part.substr(0, comma));
        first = trim(part.substr(comma + 1));
      }
      authors.push_back({{"first", first}, {"last", last},
                         {"affiliation", {{"country", ""}}}});
    }
    if (end == raw.size()) break;
    start = end + 1;
  }
  json j;
  j["paper_id"] = row.record_id;
  j["metadata"] = {{"title", row.title}, {"authors", std::move(authors)}};
  j["abstract"] = json::array({{{"text", row.abstract_text}}});
  j["body_text"] = json::array();
  if (row.publish_time) j["publish_time"] = *row.publish_time;
  return j.dump();
}

IngestReport run_ingest(store::Store& store, std::string_view metadata_csv,
                        const std::filesystem::path& articles_dir,
                        std::string_view source) {
  auto t0 = std::chrono::steady_clock::now();
  IngestLock lock(store.root());

  IngestReport report;
  ParseResult parsed = parse_metadata(metadata_csv);
  report.rejected += parsed.rejects.size();
  report.seen += parsed.rejects.size();

  std::vector<MetadataRow> fresh = diff_incremental(store, parsed.rows);
  report.skipped_existing = parsed.rows.size() - fresh.size();
  report.seen += parsed.rows.size();

  for (auto& row : fresh) {
    if (!source.empty() && row.source.empty()) row.source = std::string(source);
    std::filesystem::path file = articles_dir / (row.record_id + ".json");
    std::string bytes;
    if (std::filesystem::exists(file)) {
      std::ifstream in(file, std::ios::binary);
      bytes.assign((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    } else {
      if (row.title.empty() && row.abstract_text.empty()) {
        ++report.rejected;
        continue;
      }
      bytes = synthesize_article_file(row);
    }
    // a sha-less row may still duplicate an already-staged file
    std::string key = sha1_hex(bytes) + ".json";
    if (store.exists(store::BucketId::staging, key) ||
        store.exists(store::BucketId::completed, key)) {
      ++report.skipped_existing;
      continue;
    }
    try {
      ingest_article(store, bytes, row);
      ++report.new_count;
    } catch (const Error&) {
      ++report.rejected;
    }
  }
  report.elapsed_ms = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now() - t0).count());
  return report;
}

}  // namespace litmine::ingest
