#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace lean3d::cli {

enum ExitCode : int {
  kOk = 0,
  kUsageError = 1,
  kIoError = 2,
  kIntegrityError = 3,
  kLosslessFailure = 4,
};

/// Runs one invocation; args excludes the program name. Normal output goes to
/// `out`, diagnostics (including one machine-readable error line) to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Entropy conformance vectors: template CDFs for a fixed logit corpus and
/// rANS streams for fixed (logits, symbols) sequences.
nlohmann::json make_entropy_vectors(std::uint64_t seed = 20240601);

}  // namespace lean3d::cli
