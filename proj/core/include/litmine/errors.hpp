// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace litmine {

enum class ErrorKind {
  Validation,   // malformed input, contract violation by the caller
  NotFound,     // object/job does not exist
  Integrity,    // checksum or CRC mismatch
  Format,       // unparseable or truncated file
  Io,           // backend / filesystem / network failure
  Conflict,     // operation refused in current state
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string msg)
      : std::runtime_error(std::move(msg)), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

inline Error validation_error(std::string msg) { return Error(ErrorKind::Validation, std::move(msg)); }
inline Error not_found_error(std::string msg) { return Error(ErrorKind::NotFound, std::move(msg)); }
inline Error integrity_error(std::string msg) { return Error(ErrorKind::Integrity, std::move(msg)); }
inline Error format_error(std::string msg) { return Error(ErrorKind::Format, std::move(msg)); }
inline Error io_error(std::string msg) { return Error(ErrorKind::Io, std::move(msg)); }
inline Error conflict_error(std::string msg) { return Error(ErrorKind::Conflict, std::move(msg)); }

}  // namespace litmine
