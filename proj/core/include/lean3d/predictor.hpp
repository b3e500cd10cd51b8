#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lean3d/entropy.hpp"
#include "lean3d/hierarchy.hpp"

namespace lean3d {

/// What the shallow predictor may look at when coding one node. All of it is
/// known to the decoder before the node's own code is decoded.
struct NodeContext {
  std::uint8_t depth = 0;        // level index of the node being coded
  std::uint8_t child_index = 0;  // slot within the parent, 0..7
  std::uint8_t parent_occ = 0;   // parent's occupancy code; bit child_index is set

  friend bool operator==(const NodeContext&, const NodeContext&) = default;
};

/// Context table of pre-quantized logits for the two nibble sub-symbols.
/// Unseen contexts fall back to all-zero logits, so any model decodes any frame.
class LogitTableModel {
 public:
  static constexpr std::uint32_t kVersion = 1;

  QuantizedLogits predict_s0(const NodeContext& ctx) const;
  QuantizedLogits predict_s1(const NodeContext& ctx, unsigned s0) const;

  void set_s0(const NodeContext& ctx, const QuantizedLogits& logits);
  void set_s1(const NodeContext& ctx, unsigned s0, const QuantizedLogits& logits);

  std::size_t s0_entries() const { return s0_.size(); }
  std::size_t s1_entries() const { return s1_.size(); }
  bool empty() const { return s0_.empty() && s1_.empty(); }

  /// Canonical little-endian file image: "L3DM", version, counts, then
  /// key-sorted records of (depth, child, parent_occ, s0) + 16 x int16.
  std::vector<std::uint8_t> serialize() const;
  static LogitTableModel parse(std::span<const std::uint8_t> bytes);

  void save(const std::string& path) const;
  static LogitTableModel load(const std::string& path);

  /// FNV-1a 64 over serialize(); carried in each frame to detect model mismatch.
  std::uint64_t fingerprint() const;

  friend bool operator==(const LogitTableModel&, const LogitTableModel&) = default;

 private:
  static std::uint32_t key(const NodeContext& ctx, unsigned s0);

  std::map<std::uint32_t, QuantizedLogits> s0_;
  std::map<std::uint32_t, QuantizedLogits> s1_;
};

/// Levels coded by the shallow path for split depth `split`: 1 .. split-1
/// (level 0 ships raw), clipped to the pyramid depth.
struct LevelRange {
  std::size_t begin = 0;
  std::size_t end = 0;
};
LevelRange shallow_levels(std::size_t depth, std::size_t split);

/// Count-based fit over the shallow levels of each pyramid:
/// z~ = floor(128 ln((count + 1) / (total + 16)) + 0.5), clamped.
LogitTableModel fit_table(std::span<const OccupancyPyramid> pyramids, std::span<const std::size_t> splits);

/// Per-stream rate of one shallow level under a model.
struct LevelRate {
  std::size_t level = 0;
  std::size_t nodes = 0;
  double s0_bits = 0.0;
  double s1_bits = 0.0;
};

std::vector<LevelRate> rate_breakdown(const LogitTableModel& model, const OccupancyPyramid& pyramid,
                                      std::size_t split);

/// Ideal bits of all shallow-coded sub-symbols under the template CDFs.
double rate_bits(const LogitTableModel& model, const OccupancyPyramid& pyramid, std::size_t split);

/// Sum over shallow nodes and both nibbles of KL(q_a || p_b) in bits, with
/// the s1 distributions conditioned on the true s0.
double kl_bits(const LogitTableModel& model_a, const LogitTableModel& model_b, const OccupancyPyramid& pyramid,
               std::size_t split);

}  // namespace lean3d
