#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lean3d {

enum class ErrorKind {
  kUsage,          // caller violated an API precondition
  kParameter,      // invalid numeric parameter (q <= 0, L < 1, B <= 0, ...)
  kInput,          // non-finite or out-of-range input data
  kIo,             // file could not be opened/read/written
  kFormat,         // malformed file or packet
  kTruncation,     // declared length runs past the end of the buffer
  kCorruptStream,  // coded stream inconsistent with its own metadata
  kIntegrity,      // decode finished but integrity checks failed
  kInvariant,      // data-structure invariant violated (e.g. occupancy 0)
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Format/truncation error that also records the byte offset where parsing stopped.
class FormatError : public Error {
 public:
  FormatError(ErrorKind kind, const std::string& message, std::size_t offset)
      : Error(kind, message + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace lean3d
