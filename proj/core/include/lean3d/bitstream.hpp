#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lean3d/deepcodec.hpp"
#include "lean3d/voxel.hpp"

namespace lean3d {

/// 8-byte signature: "LEAN3D", a zero byte, and the format version.
inline constexpr std::array<std::uint8_t, 8> kFrameTitle = {'L', 'E', 'A', 'N', '3', 'D', 0, 1};

inline constexpr std::size_t kMaxDepth = 64;

struct FrameMetadata {
  std::uint32_t depths = 0;     // total hierarchy depth L
  std::uint32_t shallow_d = 0;  // split depth D_s
  std::uint32_t fp_inv_step = 128;
  std::uint32_t fp_b = 16;
  std::uint32_t fp_kmax = 15;
  std::uint64_t model_id = 0;   // fingerprint of the shallow model

  friend bool operator==(const FrameMetadata&, const FrameMetadata&) = default;
};

struct BaseStream {
  std::vector<Voxel> coords;
  std::vector<std::uint8_t> occ;

  friend bool operator==(const BaseStream&, const BaseStream&) = default;
};

struct ShallowStreams {
  std::vector<std::uint8_t> s0;
  std::vector<std::uint8_t> s1;

  friend bool operator==(const ShallowStreams&, const ShallowStreams&) = default;
};

/// Parsed form of one encoded frame. Stream count and lengths are derived
/// from the contents, so a packet cannot disagree with its own header.
struct FramePacket {
  std::uint32_t pos_q = 1;
  std::uint32_t point_count = 0;  // N: decoded voxel count
  FrameMetadata metadata;
  BaseStream base;
  std::vector<ShallowStreams> shallow;
  std::vector<DeepLevelStream> deep;

  std::uint32_t stream_count() const;
  std::vector<std::uint32_t> stream_lengths() const;
  std::size_t header_size() const;

  friend bool operator==(const FramePacket&, const FramePacket&) = default;
};

/// Expected stream count for a frame of depth L and split D_s:
/// metadata + base + 2 (D_s - 1) shallow + (L - D_s) deep.
std::uint32_t expected_stream_count(std::uint32_t depths, std::uint32_t shallow_d);

/// Throws kUsage if the packet violates its structural invariants.
void validate_packet(const FramePacket& packet);

/// Layout (little-endian): title | nS | posQ | N | lens[nS] | metadata | base |
/// shallow (s0, s1) per level | deep per level.
std::vector<std::uint8_t> serialize_frame(const FramePacket& packet);

/// Total parser: returns a packet or throws a FormatError. With strict set,
/// bytes after the packet are an error.
FramePacket parse_frame(std::span<const std::uint8_t> bytes, bool strict = true);

/// Parses the packet at the front of `bytes` and reports how many bytes it used,
/// for concatenated multi-frame files.
FramePacket parse_frame_prefix(std::span<const std::uint8_t> bytes, std::size_t& consumed);

}  // namespace lean3d
