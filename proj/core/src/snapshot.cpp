// SPDX-License-Identifier: Apache-2.0
#include <litmine/index.hpp>

#include <zlib.h>

#include <cstring>

#include <json.hpp>

#include <mutex>

#include <litmine/errors.hpp>

namespace litmine::idx {

using nlohmann::json;

namespace {

constexpr char kSnapMagic[4] = {'L', 'M', 'S', 'N'};
constexpr std::uint8_t kSnapVersion = 1;

void append_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t read_u32(std::string_view data, std::size_t pos) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(data[pos + i]);
  return v;
}

std::string read_whole_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw io_error("cannot open " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

void Index::snapshot(const std::filesystem::path& dst) const {
  std::string segment;
  {
    std::shared_lock lock(mu_);
    std::ifstream in(segment_path_, std::ios::binary);
    if (in) {
      segment.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
  }
  json manifest{{"files", json::array({{{"name", "segments.jsonl"}, {"size", segment.size()}}})}};
  std::string manifest_text = manifest.dump();

  std::string out(kSnapMagic, 4);
  out.push_back(static_cast<char>(kSnapVersion));
  append_u32(out, static_cast<std::uint32_t>(manifest_text.size()));
  out += manifest_text;
  out += segment;
  std::uint32_t crc = static_cast<std::uint32_t>(
      crc32(0, reinterpret_cast<const Bytef*>(out.data()), static_cast<uInt>(out.size())));
  append_u32(out, crc);

  std::filesystem::path tmp = dst;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw io_error("cannot create snapshot: " + tmp.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw io_error("snapshot write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, dst);
}

void Index::restore(const std::filesystem::path& src, bool force) {
  std::string data = read_whole_file(src);
  if (data.size() < 13 || std::memcmp(data.data(), kSnapMagic, 4) != 0) {
    throw integrity_error("snapshot: bad magic or truncated file");
  }
  if (static_cast<std::uint8_t>(data[4]) != kSnapVersion) {
    throw integrity_error("snapshot: unsupported version");
  }
  std::uint32_t stored_crc = read_u32(data, data.size() - 4);
  std::uint32_t actual_crc = static_cast<std::uint32_t>(
      crc32(0, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size() - 4)));
  if (stored_crc != actual_crc) throw integrity_error("snapshot: CRC mismatch");

  std::uint32_t manifest_len = read_u32(data, 5);
  std::size_t manifest_start = 9;
  if (manifest_start + manifest_len > data.size() - 4) {
    throw integrity_error("snapshot: manifest extends past payload");
  }
  json manifest = json::parse(data.substr(manifest_start, manifest_len), nullptr, false);
  if (manifest.is_discarded() || !manifest.contains("files")) {
    throw integrity_error("snapshot: bad manifest");
  }
  std::size_t payload_pos = manifest_start + manifest_len;
  std::string segment;
  for (const auto& f : manifest["files"]) {
    std::string name = f.value("name", "");
    std::size_t size = f.value("size", std::size_t{0});
    if (payload_pos + size > data.size() - 4) {
      throw integrity_error("snapshot: file " + name + " extends past payload");
    }
    if (name == "segments.jsonl") segment = data.substr(payload_pos, size);
    payload_pos += size;
  }

  std::unique_lock lock(mu_);
  bool nonempty = !id_to_ord_.empty();
  if (nonempty && !force) {
    throw conflict_error("restore refused: index is not empty (use force)");
  }
  segment_out_.close();
  {
    std::ofstream out(segment_path_, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot rewrite segment file: " + segment_path_.string());
    out.write(segment.data(), static_cast<std::streamsize>(segment.size()));
  }
  load_segment();
  segment_out_.open(segment_path_, std::ios::app);
  if (!segment_out_) throw io_error("cannot reopen segment file: " + segment_path_.string());
}

}  // namespace litmine::idx
