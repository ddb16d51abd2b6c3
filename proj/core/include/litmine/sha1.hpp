// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace litmine {

/// Lowercase 40-char hex SHA1 digest of `content`.
std::string sha1_hex(std::span<const std::byte> content);
std::string sha1_hex(std::string_view content);

}  // namespace litmine
