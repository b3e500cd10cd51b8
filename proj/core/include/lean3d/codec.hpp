#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lean3d/bitstream.hpp"
#include "lean3d/geometry.hpp"
#include "lean3d/hierarchy.hpp"
#include "lean3d/predictor.hpp"

namespace lean3d {

struct CodecConfig {
  std::uint32_t pos_q = 1;
  double split_threshold = 0.6;
  std::optional<std::size_t> split_override;
  std::optional<std::size_t> depth_override;
  const LogitTableModel* model = nullptr;  // nullptr codes with the empty (uniform) model
};

/// Wall-clock attribution per pipeline stage, in milliseconds.
struct StageTimings {
  double quantize_ms = 0.0;
  double pyramid_ms = 0.0;          // BPA
  double expand_ms = 0.0;           // BCE
  double shallow_predict_ms = 0.0;  // model lookup + CDF construction
  double shallow_entropy_ms = 0.0;  // rANS
  double deep_ms = 0.0;             // partition / Elias-Fano / packing
  double packet_ms = 0.0;           // serialize or parse

  StageTimings& operator+=(const StageTimings& o);
  double total_ms() const;
};

/// Split depth used for coding: level 0 always ships raw, so at least 1; at most L.
std::size_t effective_split(std::size_t selected, std::size_t depth);

/// Encodes an already quantized voxel set. An empty set is a usage error.
FramePacket encode_packet(const QuantizedCloud& cloud, const CodecConfig& cfg, StageTimings* timings = nullptr);

std::vector<std::uint8_t> encode_voxels(const QuantizedCloud& cloud, const CodecConfig& cfg,
                                        StageTimings* timings = nullptr);

/// quantize(points, posQ) followed by encode_voxels.
std::vector<std::uint8_t> encode_frame(const PointCloud& points, const CodecConfig& cfg,
                                       StageTimings* timings = nullptr);

struct DecodeOptions {
  /// Reject frames whose model fingerprint differs from the supplied model.
  bool check_model_id = true;
  StageTimings* timings = nullptr;
};

/// Inverse of encode_*. Stream/model inconsistencies surface as kIntegrity
/// errors; malformed packets as kFormat/kTruncation.
QuantizedCloud decode_packet(const FramePacket& packet, const LogitTableModel& model, const DecodeOptions& opts = {});
QuantizedCloud decode_frame(std::span<const std::uint8_t> bytes, const LogitTableModel& model,
                            const DecodeOptions& opts = {});

/// Byte accounting of a packet.
struct FrameSizes {
  std::size_t total = 0;
  std::size_t header = 0;
  std::size_t metadata = 0;
  std::size_t base = 0;
  std::size_t shallow = 0;
  std::size_t deep = 0;
};

FrameSizes frame_sizes(const FramePacket& packet);

}  // namespace lean3d
