// SPDX-License-Identifier: Apache-2.0
#include <litmine/sha1.hpp>

#include <openssl/evp.h>

#include <array>

#include <litmine/errors.hpp>

namespace litmine {

std::string sha1_hex(std::span<const std::byte> content) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(content.data(), content.size(), digest.data(), &len,
                 EVP_sha1(), nullptr) != 1) {
    throw io_error("sha1: digest computation failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

std::string sha1_hex(std::string_view content) {
  return sha1_hex(std::as_bytes(std::span(content.data(), content.size())));
}

}  // namespace litmine
