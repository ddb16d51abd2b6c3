// SPDX-License-Identifier: Apache-2.0
#include <litmine/store.hpp>

#include <algorithm>
#include <fstream>

#include <litmine/sha1.hpp>

namespace litmine::store {

namespace fs = std::filesystem;

std::string_view bucket_name(BucketId b) {
  switch (b) {
    case BucketId::raw: return "raw";
    case BucketId::staging: return "staging";
    case BucketId::completed: return "completed";
    case BucketId::ml_models: return "ml_models";
  }
  return "";
}

std::optional<BucketId> bucket_from_name(std::string_view name) {
  for (BucketId b : kAllBuckets) {
    if (bucket_name(b) == name) return b;
  }
  return std::nullopt;
}

bool valid_key(std::string_view key) {
  if (key.size() < 40) return false;
  for (std::size_t i = 0; i < 40; ++i) {
    char c = key[i];
    bool hex = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
    if (!hex) return false;
  }
  if (key.size() == 40) return true;
  if (key[40] != '.') return false;
  std::string_view ext = key.substr(41);
  if (ext.empty()) return false;
  return std::all_of(ext.begin(), ext.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
  });
}

std::string_view key_sha(std::string_view key) { return key.substr(0, 40); }

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw io_error("cannot open " + p.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw io_error("read failed: " + p.string());
  return data;
}

void write_file_atomic(const fs::path& p, std::span<const std::byte> content) {
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot create " + tmp.string());
    out.write(reinterpret_cast<const char*>(content.data()),
              static_cast<std::streamsize>(content.size()));
    if (!out) throw io_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, p, ec);
  if (ec) throw io_error("rename failed: " + p.string() + ": " + ec.message());
}

}  // namespace

Store::Store(fs::path root) : root_(std::move(root)) {
  for (BucketId b : kAllBuckets) {
    fs::path dir = root_ / std::string(bucket_name(b));
    fs::create_directories(dir);
    auto& set = keys_[static_cast<std::size_t>(b)];
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      std::string name = entry.path().filename().string();
      if (name.ends_with(".tmp")) {
        // leftover from an interrupted write
        std::error_code ec;
        fs::remove(entry.path(), ec);
        continue;
      }
      if (!valid_key(name)) continue;  // sidecar files (e.g. the model pointer)
      set.insert(std::move(name));
    }
  }
}

fs::path Store::object_path(BucketId bucket, std::string_view key) const {
  return root_ / std::string(bucket_name(bucket)) / std::string(key);
}

void Store::check_key(std::string_view key) const {
  if (!valid_key(key)) {
    throw validation_error("malformed object key: " + std::string(key));
  }
}

bool Store::exists_unlocked(BucketId bucket, const std::string& key) const {
  auto& set = keys_[static_cast<std::size_t>(bucket)];
  if (set.contains(key)) return true;
  std::error_code ec;
  if (fs::exists(object_path(bucket, key), ec)) {
    set.insert(key);  // written by a sibling process sharing the root
    return true;
  }
  return false;
}

ObjectRef Store::put(BucketId bucket, std::string_view key, std::span<const std::byte> content) {
  check_key(key);
  std::lock_guard lock(mu_);
  auto& set = keys_[static_cast<std::size_t>(bucket)];
  if (exists_unlocked(bucket, std::string(key))) {
    std::string existing = read_file(object_path(bucket, key));
    std::string_view incoming(reinterpret_cast<const char*>(content.data()), content.size());
    if (existing != incoming) {
      throw integrity_error("key " + std::string(key) +
                            " already holds different content");
    }
    return {bucket, std::string(key)};
  }
  write_file_atomic(object_path(bucket, key), content);
  set.insert(std::string(key));
  return {bucket, std::string(key)};
}

ObjectRef Store::put(BucketId bucket, std::string_view key, std::string_view content) {
  return put(bucket, key, std::as_bytes(std::span(content.data(), content.size())));
}

ObjectRef Store::put_content(BucketId bucket, std::span<const std::byte> content,
                             std::string_view ext) {
  std::string key = sha1_hex(content);
  if (!ext.empty()) {
    key += '.';
    key += ext;
  }
  return put(bucket, key, content);
}

ObjectRef Store::put_content(BucketId bucket, std::string_view content, std::string_view ext) {
  return put_content(bucket, std::as_bytes(std::span(content.data(), content.size())), ext);
}

std::string Store::get(BucketId bucket, std::string_view key) const {
  check_key(key);
  {
    std::lock_guard lock(mu_);
    if (!exists_unlocked(bucket, std::string(key))) {
      throw not_found_error(std::string(bucket_name(bucket)) + "/" + std::string(key));
    }
  }
  return read_file(object_path(bucket, key));
}

bool Store::exists(BucketId bucket, std::string_view key) const {
  check_key(key);
  std::lock_guard lock(mu_);
  return exists_unlocked(bucket, std::string(key));
}

ObjectRef Store::move(const ObjectRef& src, BucketId dst_bucket) {
  check_key(src.key);
  std::lock_guard lock(mu_);
  auto& src_set = keys_[static_cast<std::size_t>(src.bucket)];
  auto& dst_set = keys_[static_cast<std::size_t>(dst_bucket)];
  bool in_src = exists_unlocked(src.bucket, src.key);
  bool in_dst = exists_unlocked(dst_bucket, src.key);
  if (!in_src && !in_dst) {
    throw not_found_error("move source missing: " + std::string(bucket_name(src.bucket)) +
                          "/" + src.key);
  }
  if (in_src) {
    if (!in_dst) {
      std::string bytes = read_file(object_path(src.bucket, src.key));
      write_file_atomic(object_path(dst_bucket, src.key),
                        std::as_bytes(std::span(bytes.data(), bytes.size())));
      dst_set.insert(src.key);
    }
    std::error_code ec;
    fs::remove(object_path(src.bucket, src.key), ec);
    if (ec) throw io_error("delete failed: " + src.key + ": " + ec.message());
    src_set.erase(src.key);
  }
  return {dst_bucket, src.key};
}

void Store::remove(BucketId bucket, std::string_view key) {
  check_key(key);
  std::lock_guard lock(mu_);
  auto& set = keys_[static_cast<std::size_t>(bucket)];
  if (!set.contains(std::string(key))) return;
  std::error_code ec;
  fs::remove(object_path(bucket, key), ec);
  if (ec) throw io_error("delete failed: " + std::string(key) + ": " + ec.message());
  set.erase(std::string(key));
}

std::vector<std::string> Store::list(BucketId bucket, std::size_t limit,
                                     std::optional<std::string_view> after) const {
  if (limit < 1) throw validation_error("list limit must be >= 1");
  std::vector<std::string> sorted;
  {
    std::lock_guard lock(mu_);
    const auto& set = keys_[static_cast<std::size_t>(bucket)];
    sorted.assign(set.begin(), set.end());
  }
  std::sort(sorted.begin(), sorted.end());
  auto begin = sorted.begin();
  if (after) {
    begin = std::upper_bound(sorted.begin(), sorted.end(), std::string(*after));
  }
  auto end = begin + std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(limit),
                                              sorted.end() - begin);
  return {begin, end};
}

std::size_t Store::count(BucketId bucket) const {
  std::lock_guard lock(mu_);
  return keys_[static_cast<std::size_t>(bucket)].size();
}

}  // namespace litmine::store
