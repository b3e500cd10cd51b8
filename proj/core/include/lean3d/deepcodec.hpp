#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lean3d {

/// Unary nodes carry the slot k with occ == 1 << k; non-unary nodes are
/// listed by position. Positions are 0-based in coding order.
struct OccupancyPartition {
  std::vector<std::uint32_t> unary_positions;
  std::vector<std::uint8_t> unary_k;
  std::vector<std::uint32_t> nonunary_positions;
};

OccupancyPartition partition(std::span<const std::uint8_t> occ);

struct EliasFano {
  std::uint32_t low_bits = 0;
  std::vector<std::uint8_t> high;
  std::vector<std::uint8_t> low;

  friend bool operator==(const EliasFano&, const EliasFano&) = default;
};

/// floor(log2(universe / count)), or 0 when count == 0 or universe <= count.
std::uint32_t elias_fano_low_bits(std::uint64_t count, std::uint64_t universe);
std::size_t elias_fano_high_bytes(std::uint64_t count, std::uint64_t universe, std::uint32_t low_bits);
std::size_t elias_fano_low_bytes(std::uint64_t count, std::uint32_t low_bits);

/// Strictly increasing indices in [0, universe).
EliasFano ef_encode(std::span<const std::uint32_t> indices, std::uint32_t universe);
std::vector<std::uint32_t> ef_decode(const EliasFano& ef, std::uint32_t count, std::uint32_t universe);

/// 3 bits per value, LSB-first, zero-padded to a byte boundary.
std::vector<std::uint8_t> pack3(std::span<const std::uint8_t> values);
std::vector<std::uint8_t> unpack3(std::span<const std::uint8_t> bytes, std::size_t count);

struct DeepLevelStream {
  std::uint32_t node_count = 0;     // Nu
  std::uint32_t nonunary_count = 0; // Msplit
  std::uint32_t low_bits = 0;       // Elias-Fano low width
  std::vector<std::uint8_t> ef_high;
  std::vector<std::uint8_t> ef_low;
  std::vector<std::uint8_t> unary_k;
  std::vector<std::uint8_t> nonunary_occ;

  std::size_t payload_bytes() const {
    return ef_high.size() + ef_low.size() + unary_k.size() + nonunary_occ.size();
  }
  friend bool operator==(const DeepLevelStream&, const DeepLevelStream&) = default;
};

DeepLevelStream encode_deep_level(std::span<const std::uint8_t> occ);

/// Validates every substream length against the closed-form sizes before decoding.
std::vector<std::uint8_t> decode_deep_level(const DeepLevelStream& stream);

/// ceil(3 (Nu - M) / 8) + M + |EF high| + |EF low|.
std::size_t deep_payload_size(std::uint32_t node_count, std::uint32_t nonunary_count);

}  // namespace lean3d
