// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include <litmine/errors.hpp>

namespace litmine::store {

// The four lifecycle buckets. Names are fixed and case-sensitive.
enum class BucketId { raw, staging, completed, ml_models };

constexpr std::array<BucketId, 4> kAllBuckets = {
    BucketId::raw, BucketId::staging, BucketId::completed, BucketId::ml_models};

std::string_view bucket_name(BucketId b);
std::optional<BucketId> bucket_from_name(std::string_view name);

struct ObjectRef {
  BucketId bucket;
  std::string key;  // "<40-hex-sha1>" plus optional ".<ext>"

  bool operator==(const ObjectRef&) const = default;
};

/// True iff `key` is 40 lowercase hex chars plus an optional dot-extension.
bool valid_key(std::string_view key);

/// The 40-hex portion of a well-formed key.
std::string_view key_sha(std::string_view key);

struct ListPage {
  std::vector<std::string> keys;  // lexicographic order
};

// Directory-per-bucket object store on the local filesystem. One file per
// object; an in-memory key set per bucket is rebuilt on startup so existence
// checks are hash lookups, never directory scans.
//
// Thread-safety: all operations may interleave from any number of threads.
// list() returns a snapshot of keys committed before the call began.
class Store {
public:
  explicit Store(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  /// Writes `content` under `key`. Re-putting identical content is a no-op
  /// success; different content under the same key is an integrity error.
  ObjectRef put(BucketId bucket, std::string_view key, std::span<const std::byte> content);
  ObjectRef put(BucketId bucket, std::string_view key, std::string_view content);

  /// Stores `content` keyed by its own SHA1 plus `ext`, e.g. put_content(b, bytes, "json").
  ObjectRef put_content(BucketId bucket, std::span<const std::byte> content, std::string_view ext);
  ObjectRef put_content(BucketId bucket, std::string_view content, std::string_view ext);

  std::string get(BucketId bucket, std::string_view key) const;

  /// O(1): in-memory key-set lookup, no directory scan.
  bool exists(BucketId bucket, std::string_view key) const;

  /// Copy-to-destination then delete-source; destination presence counts as
  /// success on retry, so the operation is idempotent.
  ObjectRef move(const ObjectRef& src, BucketId dst_bucket);

  void remove(BucketId bucket, std::string_view key);

  /// Lexicographically ordered keys, at most `limit`, strictly after `after`.
  std::vector<std::string> list(BucketId bucket, std::size_t limit,
                                std::optional<std::string_view> after = std::nullopt) const;

  std::size_t count(BucketId bucket) const;

  std::filesystem::path object_path(BucketId bucket, std::string_view key) const;

private:
  void check_key(std::string_view key) const;
  // set lookup with a stat() fallback for objects written by other processes
  // sharing the root; both paths are O(1) in bucket cardinality
  bool exists_unlocked(BucketId bucket, const std::string& key) const;

  std::filesystem::path root_;
  mutable std::mutex mu_;
  mutable std::array<std::unordered_set<std::string>, 4> keys_;
};

}  // namespace litmine::store
