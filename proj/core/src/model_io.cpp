// SPDX-License-Identifier: Apache-2.0
#include <litmine/classifier.hpp>

#include <zlib.h>

#include <cstring>
#include <fstream>

#include <json.hpp>

#include <litmine/errors.hpp>
#include <litmine/sha1.hpp>

namespace litmine::ml {

namespace {

constexpr char kMagic[4] = {'L', 'M', 'M', 'L'};
constexpr std::uint8_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(out, bits);
}

class Reader {
public:
  explicit Reader(std::string_view data) : data_(data) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }

  std::string_view bytes(std::size_t n) {
    if (remaining() < n) {
      throw format_error("model file truncated at offset " + std::to_string(pos_));
    }
    std::string_view out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  std::uint32_t u32() {
    auto b = bytes(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[i]);
    return v;
  }

  std::uint64_t u64() {
    auto b = bytes(8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[i]);
    return v;
  }

  double f64() {
    std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }

private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

const char* kCurrentPointerFile = "CURRENT";

}  // namespace

std::string serialize_model(const ModelArtifact& m) {
  std::string out(kMagic, 4);
  out.push_back(static_cast<char>(kVersion));
  put_u32(out, static_cast<std::uint32_t>(m.labels.size()));
  for (const auto& label : m.labels) {
    put_u32(out, static_cast<std::uint32_t>(label.size()));
    out += label;
  }
  put_u32(out, m.feature_dims);
  put_u64(out, m.hash_seed);
  put_f64(out, m.eval_accuracy);
  put_u64(out, m.trained_at);
  put_u32(out, static_cast<std::uint32_t>(m.train_set_sha.size()));
  out += m.train_set_sha;
  for (double b : m.bias) put_f64(out, b);
  // CSR weight payload: row offsets, then (col, value) pairs per row
  std::uint64_t nnz = 0;
  put_u64(out, 0);  // placeholder patched below
  std::size_t nnz_pos = out.size() - 8;
  std::vector<std::uint64_t> row_ptr(m.labels.size() + 1, 0);
  std::string cols, vals;
  for (std::size_t c = 0; c < m.weights.size(); ++c) {
    for (std::uint32_t j = 0; j < m.feature_dims; ++j) {
      if (m.weights[c][j] != 0.0) {
        put_u32(cols, j);
        put_f64(vals, m.weights[c][j]);
        ++nnz;
      }
    }
    row_ptr[c + 1] = nnz;
  }
  for (std::uint64_t rp : row_ptr) put_u64(out, rp);
  out += cols;
  out += vals;
  std::uint64_t nnz_le = nnz;
  for (int i = 0; i < 8; ++i) out[nnz_pos + i] = static_cast<char>((nnz_le >> (8 * i)) & 0xff);
  std::uint32_t crc = static_cast<std::uint32_t>(
      crc32(0, reinterpret_cast<const Bytef*>(out.data()), static_cast<uInt>(out.size())));
  put_u32(out, crc);
  return out;
}

ModelArtifact deserialize_model(std::string_view bytes) {
  if (bytes.size() < 9) throw format_error("model file truncated at offset 0");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw format_error("model file: bad magic at offset 0");
  }
  std::uint8_t version = static_cast<std::uint8_t>(bytes[4]);
  if (version != kVersion) {
    throw format_error("model file: unsupported version " + std::to_string(version));
  }
  std::uint32_t stored_crc;
  {
    Reader tail(bytes.substr(bytes.size() - 4));
    stored_crc = tail.u32();
  }
  std::uint32_t actual_crc = static_cast<std::uint32_t>(
      crc32(0, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size() - 4)));
  if (stored_crc != actual_crc) {
    throw format_error("model file: CRC mismatch at offset " + std::to_string(bytes.size() - 4));
  }

  Reader r(bytes.substr(0, bytes.size() - 4));
  r.bytes(5);  // magic + version, validated above
  ModelArtifact m;
  std::uint32_t c_count = r.u32();
  if (c_count < 2 || c_count > 1'000'000) {
    throw format_error("model file: implausible label count at offset " + std::to_string(r.offset()));
  }
  m.labels.reserve(c_count);
  for (std::uint32_t c = 0; c < c_count; ++c) {
    std::uint32_t len = r.u32();
    m.labels.emplace_back(r.bytes(len));
  }
  m.feature_dims = r.u32();
  m.hash_seed = r.u64();
  m.eval_accuracy = r.f64();
  m.trained_at = r.u64();
  std::uint32_t sha_len = r.u32();
  m.train_set_sha = std::string(r.bytes(sha_len));
  m.bias.resize(c_count);
  for (auto& b : m.bias) b = r.f64();
  std::uint64_t nnz = r.u64();
  std::vector<std::uint64_t> row_ptr(c_count + 1);
  for (auto& rp : row_ptr) rp = r.u64();
  if (row_ptr[0] != 0 || row_ptr[c_count] != nnz) {
    throw format_error("model file: inconsistent row offsets at offset " + std::to_string(r.offset()));
  }
  std::vector<std::uint32_t> cols(nnz);
  for (auto& col : cols) col = r.u32();
  m.weights.assign(c_count, std::vector<double>(m.feature_dims, 0.0));
  for (std::uint32_t c = 0; c < c_count; ++c) {
    for (std::uint64_t k = row_ptr[c]; k < row_ptr[c + 1]; ++k) {
      if (cols[k] >= m.feature_dims) {
        throw format_error("model file: column out of range at offset " + std::to_string(r.offset()));
      }
      m.weights[c][cols[k]] = r.f64();
    }
  }
  if (r.remaining() != 0) {
    throw format_error("model file: trailing bytes at offset " + std::to_string(r.offset()));
  }
  return m;
}

store::ObjectRef save_model(store::Store& store, const ModelArtifact& m) {
  return store.put_content(store::BucketId::ml_models, serialize_model(m), "model");
}

ModelArtifact load_model(const store::Store& store, std::string_view key) {
  return deserialize_model(store.get(store::BucketId::ml_models, key));
}

void set_current_model(store::Store& store, std::string_view key) {
  auto path = store.root() / "ml_models" / kCurrentPointerFile;
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw io_error("cannot write model pointer: " + tmp.string());
    out << key << '\n';
  }
  std::filesystem::rename(tmp, path);
}

std::optional<std::string> current_model_key(const store::Store& store) {
  auto path = store.root() / "ml_models" / kCurrentPointerFile;
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string key;
  std::getline(in, key);
  if (key.empty()) return std::nullopt;
  return key;
}

std::string install_model(store::Store& store, const ModelArtifact& candidate) {
  std::optional<ModelArtifact> incumbent;
  auto incumbent_key = current_model_key(store);
  if (incumbent_key) incumbent = load_model(store, *incumbent_key);
  const ModelArtifact& winner = select_model(candidate, incumbent);
  if (incumbent && &winner == &*incumbent) {
    return *incumbent_key;  // pointer unchanged
  }
  auto ref = save_model(store, winner);
  set_current_model(store, ref.key);
  return ref.key;
}

std::vector<LabeledExample> parse_training_data(std::string_view jsonl) {
  std::vector<LabeledExample> out;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < jsonl.size()) {
    std::size_t end = jsonl.find('\n', start);
    if (end == std::string_view::npos) end = jsonl.size();
    std::string_view line = jsonl.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("text") || !j.contains("label")) {
      throw format_error("training data: bad record on line " + std::to_string(line_no));
    }
    out.push_back({j["text"].get<std::string>(), j["label"].get<std::string>()});
  }
  return out;
}

std::string serialize_training_data(const std::vector<LabeledExample>& examples) {
  std::string out;
  for (const auto& ex : examples) {
    nlohmann::json j{{"text", ex.text}, {"label", ex.label}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace litmine::ml
