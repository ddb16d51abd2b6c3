// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace litmine::csv {

// RFC-4180 style CSV: quoted fields may contain commas, newlines and
// doubled quotes. Accepts both \n and \r\n row terminators.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Throws Format when the input has no header row or ends inside a quote.
Table parse(std::string_view input);

std::string escape_field(std::string_view field);

}  // namespace litmine::csv
