#include "lean3d/codec.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <string>
#include <unordered_map>

#include "lean3d/entropy.hpp"
#include "lean3d/error.hpp"

namespace lean3d {
namespace {

using Clock = std::chrono::steady_clock;

class StageTimer {
 public:
  explicit StageTimer(double* sink) : sink_(sink), start_(sink ? Clock::now() : Clock::time_point{}) {}
  ~StageTimer() {
    if (sink_) *sink_ += std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
  }
  StageTimer(const StageTimer&) = delete;
  StageTimer& operator=(const StageTimer&) = delete;

 private:
  double* sink_;
  Clock::time_point start_;
};

double* slot(StageTimings* t, double StageTimings::*member) { return t ? &(t->*member) : nullptr; }

const LogitTableModel& empty_model() {
  static const LogitTableModel m;
  return m;
}

/// Memoizes template CDFs per context within one level; contexts repeat heavily.
class CdfCache {
 public:
  CdfCache(const LogitTableModel& model, std::size_t depth) : model_(model), depth_(depth) {}

  const IntegerCdf& s0(const ChildNode& n) {
    const std::uint32_t key = (std::uint32_t{n.child_index} << 8) | n.parent_occ;
    auto [it, inserted] = s0_.try_emplace(key);
    if (inserted) it->second = logits_to_cdf(model_.predict_s0(context(n)));
    return it->second;
  }

  const IntegerCdf& s1(const ChildNode& n, unsigned s0) {
    const std::uint32_t key = (std::uint32_t{n.child_index} << 12) | (std::uint32_t{n.parent_occ} << 4) | s0;
    auto [it, inserted] = s1_.try_emplace(key);
    if (inserted) it->second = logits_to_cdf(model_.predict_s1(context(n), s0));
    return it->second;
  }

 private:
  NodeContext context(const ChildNode& n) const {
    return {static_cast<std::uint8_t>(depth_), n.child_index, n.parent_occ};
  }

  const LogitTableModel& model_;
  std::size_t depth_;
  std::unordered_map<std::uint32_t, IntegerCdf> s0_;
  std::unordered_map<std::uint32_t, IntegerCdf> s1_;
};

ShallowStreams encode_shallow_level(const LogitTableModel& model, std::size_t depth, const VoxelLevel& parent,
                                    const VoxelLevel& level, StageTimings* t) {
  std::vector<ChildNode> nodes;
  {
    StageTimer timer(slot(t, &StageTimings::expand_ms));
    nodes = bce_with_context(parent);
  }
  if (nodes.size() != level.size()) fail(ErrorKind::kInvariant, "pyramid levels are not BCE-consistent");

  CdfCache cache(model, depth);
  std::vector<const IntegerCdf*> cdf0(nodes.size()), cdf1(nodes.size());
  {
    StageTimer timer(slot(t, &StageTimings::shallow_predict_ms));
    // unordered_map values never move, so the pointers stay valid
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      cdf0[i] = &cache.s0(nodes[i]);
      cdf1[i] = &cache.s1(nodes[i], level.occ[i] & 0x0Fu);
    }
  }
  StageTimer timer(slot(t, &StageTimings::shallow_entropy_ms));
  ShallowStreams out;
  RansEncoder enc;
  for (std::size_t i = nodes.size(); i-- > 0;) enc.put(level.occ[i] & 0x0Fu, *cdf0[i]);
  out.s0 = enc.finish();
  for (std::size_t i = nodes.size(); i-- > 0;) enc.put(level.occ[i] >> 4, *cdf1[i]);
  out.s1 = enc.finish();
  return out;
}

std::vector<std::uint8_t> decode_shallow_level(const LogitTableModel& model, std::size_t depth,
                                               const std::vector<ChildNode>& nodes, const ShallowStreams& streams,
                                               StageTimings* t) {
  CdfCache cache(model, depth);
  std::vector<std::uint8_t> occ(nodes.size());
  // prediction and entropy decoding interleave per symbol; attribute the
  // whole loop to entropy and the cache fills to prediction
  double predict_ms = 0.0;
  auto cdf_for = [&](auto&& get) -> const IntegerCdf& {
    if (!t) return get();
    const auto start = Clock::now();
    const IntegerCdf& c = get();
    predict_ms += std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    return c;
  };
  const auto start = Clock::now();
  {
    RansDecoder dec(streams.s0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      occ[i] = static_cast<std::uint8_t>(dec.get(cdf_for([&]() -> const IntegerCdf& { return cache.s0(nodes[i]); })));
    }
    dec.finish();
  }
  {
    RansDecoder dec(streams.s1);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const unsigned s0 = occ[i];
      const unsigned s1 = dec.get(cdf_for([&]() -> const IntegerCdf& { return cache.s1(nodes[i], s0); }));
      occ[i] = static_cast<std::uint8_t>((s1 << 4) | s0);
      if (occ[i] == 0) fail(ErrorKind::kInvariant, "decoded occupancy code 0");
    }
    dec.finish();
  }
  if (t) {
    const double total = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    t->shallow_predict_ms += predict_ms;
    t->shallow_entropy_ms += total - predict_ms;
  }
  return occ;
}

void check_base(const BaseStream& base) {
  if (base.coords.empty()) fail(ErrorKind::kCorruptStream, "base stream is empty");
  for (std::size_t i = 0; i < base.coords.size(); ++i) {
    if (base.occ[i] == 0) fail(ErrorKind::kInvariant, "base occupancy code 0");
    if (i > 0 && !(base.coords[i - 1] < base.coords[i])) {
      fail(ErrorKind::kCorruptStream, "base coordinates not in canonical order");
    }
  }
}

bool is_canonical(const std::vector<Voxel>& v) {
  return std::adjacent_find(v.begin(), v.end(), [](const Voxel& a, const Voxel& b) { return !(a < b); }) == v.end();
}

}  // namespace

StageTimings& StageTimings::operator+=(const StageTimings& o) {
  quantize_ms += o.quantize_ms;
  pyramid_ms += o.pyramid_ms;
  expand_ms += o.expand_ms;
  shallow_predict_ms += o.shallow_predict_ms;
  shallow_entropy_ms += o.shallow_entropy_ms;
  deep_ms += o.deep_ms;
  packet_ms += o.packet_ms;
  return *this;
}

double StageTimings::total_ms() const {
  return quantize_ms + pyramid_ms + expand_ms + shallow_predict_ms + shallow_entropy_ms + deep_ms + packet_ms;
}

std::size_t effective_split(std::size_t selected, std::size_t depth) {
  return std::clamp<std::size_t>(selected, 1, std::max<std::size_t>(depth, 1));
}

FramePacket encode_packet(const QuantizedCloud& cloud, const CodecConfig& cfg, StageTimings* t) {
  if (cfg.pos_q == 0) fail(ErrorKind::kParameter, "posQ must be positive");
  if (!(cfg.split_threshold > 0.0 && cfg.split_threshold < 1.0)) {
    fail(ErrorKind::kParameter, "split threshold must lie in (0, 1)");
  }
  if (cloud.voxels.empty()) fail(ErrorKind::kUsage, "cannot encode an empty cloud");
  const LogitTableModel& model = cfg.model ? *cfg.model : empty_model();

  std::vector<Voxel> sorted;
  const std::vector<Voxel>* leaves = &cloud.voxels;
  if (!is_canonical(cloud.voxels)) {
    sorted = cloud.voxels;
    canonicalize(sorted);
    leaves = &sorted;
  }

  const std::size_t depth = cfg.depth_override.value_or(default_depth(*leaves));
  if (depth < 1 || depth > kMaxDepth) fail(ErrorKind::kParameter, "depth must lie in 1.." + std::to_string(kMaxDepth));
  OccupancyPyramid pyr;
  {
    StageTimer timer(slot(t, &StageTimings::pyramid_ms));
    pyr = build_pyramid(*leaves, depth);
  }
  if (cfg.split_override && *cfg.split_override > depth) {
    fail(ErrorKind::kParameter, "split depth exceeds hierarchy depth");
  }
  const std::size_t split =
      effective_split(cfg.split_override.value_or(select_split_depth(pyr, cfg.split_threshold)), depth);

  FramePacket p;
  p.pos_q = cfg.pos_q;
  p.point_count = static_cast<std::uint32_t>(leaves->size());
  p.metadata.depths = static_cast<std::uint32_t>(depth);
  p.metadata.shallow_d = static_cast<std::uint32_t>(split);
  p.metadata.model_id = model.fingerprint();
  p.base.coords = pyr.levels[0].coords;
  p.base.occ = pyr.levels[0].occ;

  for (std::size_t d = 1; d < split; ++d) {
    p.shallow.push_back(encode_shallow_level(model, d, pyr.levels[d - 1], pyr.levels[d], t));
  }
  {
    StageTimer timer(slot(t, &StageTimings::deep_ms));
    for (std::size_t d = split; d < depth; ++d) p.deep.push_back(encode_deep_level(pyr.levels[d].occ));
  }
  return p;
}

std::vector<std::uint8_t> encode_voxels(const QuantizedCloud& cloud, const CodecConfig& cfg, StageTimings* t) {
  auto packet = encode_packet(cloud, cfg, t);
  StageTimer timer(slot(t, &StageTimings::packet_ms));
  return serialize_frame(packet);
}

std::vector<std::uint8_t> encode_frame(const PointCloud& points, const CodecConfig& cfg, StageTimings* t) {
  if (cfg.pos_q == 0) fail(ErrorKind::kParameter, "posQ must be positive");
  QuantizedCloud q;
  {
    StageTimer timer(slot(t, &StageTimings::quantize_ms));
    q = quantize(points, static_cast<double>(cfg.pos_q));
  }
  return encode_voxels(q, cfg, t);
}

QuantizedCloud decode_packet(const FramePacket& p, const LogitTableModel& model, const DecodeOptions& opts) {
  const auto& m = p.metadata;
  if (m.fp_inv_step != static_cast<std::uint32_t>(kLogitScale) || m.fp_b != static_cast<std::uint32_t>(kProbBits) ||
      m.fp_kmax != kAlphabetSize - 1) {
    fail(ErrorKind::kFormat, "unsupported entropy parameters in frame metadata");
  }
  if (m.shallow_d < 1 || m.shallow_d > m.depths || m.depths > kMaxDepth) {
    fail(ErrorKind::kFormat, "unsupported split/depth in frame metadata");
  }
  if (p.pos_q == 0) fail(ErrorKind::kFormat, "posQ of 0 in frame header");
  validate_packet(p);
  if (opts.check_model_id && m.model_id != model.fingerprint()) {
    fail(ErrorKind::kIntegrity, "frame was encoded with a different model");
  }

  StageTimings* t = opts.timings;
  const char* stage = "base";
  try {
    check_base(p.base);
    VoxelLevel level{p.base.coords, p.base.occ};
    const std::size_t depth = m.depths;
    const std::size_t split = m.shallow_d;
    auto check_size = [&](std::size_t n) {
      if (n > p.point_count) fail(ErrorKind::kCorruptStream, "level larger than the declared point count");
    };
    check_size(level.size());

    stage = "shallow";
    for (std::size_t d = 1; d < split; ++d) {
      std::vector<ChildNode> nodes;
      {
        StageTimer timer(slot(t, &StageTimings::expand_ms));
        nodes = bce_with_context(level);
      }
      check_size(nodes.size());
      VoxelLevel next;
      next.occ = decode_shallow_level(model, d, nodes, p.shallow[d - 1], t);
      next.coords.reserve(nodes.size());
      for (const auto& n : nodes) next.coords.push_back(n.coord);
      level = std::move(next);
    }

    stage = "deep";
    for (std::size_t d = split; d < depth; ++d) {
      VoxelLevel next;
      {
        StageTimer timer(slot(t, &StageTimings::expand_ms));
        next.coords = bce(level);
      }
      check_size(next.coords.size());
      const auto& s = p.deep[d - split];
      if (s.node_count != next.coords.size()) fail(ErrorKind::kCorruptStream, "deep node count mismatch");
      StageTimer timer(slot(t, &StageTimings::deep_ms));
      next.occ = decode_deep_level(s);
      level = std::move(next);
    }

    stage = "leaves";
    QuantizedCloud out;
    out.q = static_cast<double>(p.pos_q);
    {
      StageTimer timer(slot(t, &StageTimings::expand_ms));
      out.voxels = bce(level);
    }
    if (out.voxels.size() != p.point_count) fail(ErrorKind::kIntegrity, "leaf count differs from header N");
    return out;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kInvariant || e.kind() == ErrorKind::kCorruptStream ||
        e.kind() == ErrorKind::kIntegrity) {
      throw Error(ErrorKind::kIntegrity, std::string("decode failed in ") + stage + " stage: " + e.what());
    }
    throw;
  }
}

QuantizedCloud decode_frame(std::span<const std::uint8_t> bytes, const LogitTableModel& model,
                            const DecodeOptions& opts) {
  FramePacket p;
  {
    StageTimer timer(slot(opts.timings, &StageTimings::packet_ms));
    p = parse_frame(bytes);
  }
  return decode_packet(p, model, opts);
}

FrameSizes frame_sizes(const FramePacket& p) {
  FrameSizes s;
  const auto lens = p.stream_lengths();
  s.header = p.header_size();
  s.metadata = lens[0];
  s.base = lens[1];
  for (std::size_t i = 2; i < 2 + 2 * p.shallow.size(); ++i) s.shallow += lens[i];
  for (std::size_t i = 2 + 2 * p.shallow.size(); i < lens.size(); ++i) s.deep += lens[i];
  s.total = s.header + std::accumulate(lens.begin(), lens.end(), std::size_t{0});
  return s;
}

}  // namespace lean3d
