#include "lean3d/error.hpp"

namespace lean3d {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage: return "usage";
    case ErrorKind::kParameter: return "parameter";
    case ErrorKind::kInput: return "input";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kTruncation: return "truncation";
    case ErrorKind::kCorruptStream: return "corrupt-stream";
    case ErrorKind::kIntegrity: return "integrity";
    case ErrorKind::kInvariant: return "invariant";
  }
  return "unknown";
}

}  // namespace lean3d
