#include "lean3d/bitstream.hpp"

#include <algorithm>
#include <string>

#include "lean3d/byte_io.hpp"
#include "lean3d/error.hpp"

namespace lean3d {
namespace {

constexpr std::size_t kMetadataSize = 5 * 4 + 8;
constexpr std::size_t kDeepHeaderSize = 7 * 4;
constexpr std::size_t kFixedHeader = 8 + 3 * 4;

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > 0xFFFFFFFFull) fail(ErrorKind::kUsage, std::string(what) + " exceeds 32 bits");
  return static_cast<std::uint32_t>(v);
}

std::size_t deep_stream_size(const DeepLevelStream& s) { return kDeepHeaderSize + s.payload_bytes(); }

void write_deep(ByteWriter& w, const DeepLevelStream& s) {
  w.u32(s.node_count);
  w.u32(s.nonunary_count);
  w.u32(s.low_bits);
  w.u32(checked_u32(s.ef_high.size(), "EF high length"));
  w.u32(checked_u32(s.ef_low.size(), "EF low length"));
  w.u32(checked_u32(s.unary_k.size(), "unary length"));
  w.u32(checked_u32(s.nonunary_occ.size(), "non-unary length"));
  w.bytes(s.ef_high);
  w.bytes(s.ef_low);
  w.bytes(s.unary_k);
  w.bytes(s.nonunary_occ);
}

std::vector<std::uint8_t> to_vec(std::span<const std::uint8_t> s) { return {s.begin(), s.end()}; }

FrameMetadata read_metadata(ByteReader in) {
  FrameMetadata m;
  m.depths = in.u32();
  m.shallow_d = in.u32();
  m.fp_inv_step = in.u32();
  m.fp_b = in.u32();
  m.fp_kmax = in.u32();
  m.model_id = in.u64();
  return m;
}

BaseStream read_base(ByteReader in, std::size_t length) {
  const std::size_t start = in.offset();
  const std::uint64_t n0 = in.u32();
  if (length != 4 + 13 * n0) throw FormatError(ErrorKind::kFormat, "base stream length does not match n0", start);
  BaseStream b;
  b.coords.resize(static_cast<std::size_t>(n0));
  for (auto& c : b.coords) {
    c.x = in.i32();
    c.y = in.i32();
    c.z = in.i32();
  }
  b.occ = to_vec(in.bytes(static_cast<std::size_t>(n0), "base occupancy"));
  return b;
}

DeepLevelStream read_deep(ByteReader in, std::size_t length) {
  const std::size_t start = in.offset();
  if (length < kDeepHeaderSize) throw FormatError(ErrorKind::kFormat, "deep stream shorter than its header", start);
  DeepLevelStream s;
  s.node_count = in.u32();
  s.nonunary_count = in.u32();
  s.low_bits = in.u32();
  std::uint64_t lens[4];
  std::uint64_t sum = 0;
  for (auto& l : lens) sum += (l = in.u32());
  if (sum != length - kDeepHeaderSize) {
    throw FormatError(ErrorKind::kFormat, "deep substream lengths do not sum to the stream length", start);
  }
  s.ef_high = to_vec(in.bytes(static_cast<std::size_t>(lens[0]), "EF high"));
  s.ef_low = to_vec(in.bytes(static_cast<std::size_t>(lens[1]), "EF low"));
  s.unary_k = to_vec(in.bytes(static_cast<std::size_t>(lens[2]), "unary ids"));
  s.nonunary_occ = to_vec(in.bytes(static_cast<std::size_t>(lens[3]), "non-unary bytes"));
  return s;
}

FramePacket parse_impl(std::span<const std::uint8_t> bytes, std::size_t& consumed) {
  ByteReader in(bytes);
  auto title = in.bytes(kFrameTitle.size(), "title");
  if (!std::equal(title.begin(), title.end(), kFrameTitle.begin())) {
    throw FormatError(ErrorKind::kFormat, "bad frame signature", 0);
  }
  const std::uint32_t n_streams = in.u32();
  FramePacket p;
  p.pos_q = in.u32();
  p.point_count = in.u32();
  if (n_streams < 2) throw FormatError(ErrorKind::kFormat, "frame declares fewer than 2 streams", 8);
  in.require(std::size_t{n_streams} * 4, "stream length table");
  std::vector<std::uint64_t> lens(n_streams);
  std::uint64_t total = 0;
  for (auto& l : lens) total += (l = in.u32());
  if (total > in.remaining()) {
    throw FormatError(ErrorKind::kTruncation, "declared stream lengths exceed the packet", in.offset());
  }

  // Every stream is sliced out of its declared extent, so a bad length inside
  // one stream cannot make the parser read into the next.
  auto stream = [&](std::size_t i) {
    const std::size_t at = in.offset();
    return ByteReader(in.bytes(static_cast<std::size_t>(lens[i]), "stream"), at);
  };

  if (lens[0] != kMetadataSize) throw FormatError(ErrorKind::kFormat, "metadata stream has wrong length", in.offset());
  p.metadata = read_metadata(stream(0));
  const auto& m = p.metadata;
  if (m.depths < 1 || m.depths > kMaxDepth || m.shallow_d > m.depths) {
    throw FormatError(ErrorKind::kFormat, "metadata depths out of range", kFixedHeader + 4 * lens.size());
  }
  if (n_streams != expected_stream_count(m.depths, m.shallow_d)) {
    throw FormatError(ErrorKind::kFormat, "stream count does not match metadata depths", 8);
  }

  p.base = read_base(stream(1), static_cast<std::size_t>(lens[1]));
  const std::size_t n_shallow = m.shallow_d > 0 ? m.shallow_d - 1 : 0;
  std::size_t idx = 2;
  p.shallow.resize(n_shallow);
  auto take = [&](std::size_t i) { return to_vec(stream(i).bytes(static_cast<std::size_t>(lens[i]), "rANS stream")); };
  for (auto& s : p.shallow) {
    s.s0 = take(idx++);
    s.s1 = take(idx++);
  }
  while (idx < n_streams) {
    const auto len = static_cast<std::size_t>(lens[idx]);
    p.deep.push_back(read_deep(stream(idx), len));
    ++idx;
  }
  consumed = in.position();
  return p;
}

}  // namespace

std::uint32_t expected_stream_count(std::uint32_t depths, std::uint32_t shallow_d) {
  const std::uint32_t shallow = shallow_d > 0 ? shallow_d - 1 : 0;
  return 2 + 2 * shallow + (depths - shallow_d);
}

std::uint32_t FramePacket::stream_count() const {
  return checked_u32(2 + 2 * shallow.size() + deep.size(), "stream count");
}

std::vector<std::uint32_t> FramePacket::stream_lengths() const {
  std::vector<std::uint32_t> out;
  out.push_back(kMetadataSize);
  out.push_back(checked_u32(4 + 13 * base.coords.size(), "base stream"));
  for (const auto& s : shallow) {
    out.push_back(checked_u32(s.s0.size(), "s0 stream"));
    out.push_back(checked_u32(s.s1.size(), "s1 stream"));
  }
  for (const auto& d : deep) out.push_back(checked_u32(deep_stream_size(d), "deep stream"));
  return out;
}

std::size_t FramePacket::header_size() const { return kFixedHeader + 4 * std::size_t{stream_count()}; }

void validate_packet(const FramePacket& p) {
  const auto& m = p.metadata;
  if (m.depths < 1 || m.depths > kMaxDepth) fail(ErrorKind::kUsage, "packet depth out of range");
  if (m.shallow_d > m.depths) fail(ErrorKind::kUsage, "split depth exceeds packet depth");
  const std::size_t n_shallow = m.shallow_d > 0 ? m.shallow_d - 1 : 0;
  if (p.shallow.size() != n_shallow) fail(ErrorKind::kUsage, "shallow stream count does not match split depth");
  if (p.deep.size() != m.depths - m.shallow_d) fail(ErrorKind::kUsage, "deep stream count does not match depths");
  if (p.base.coords.size() != p.base.occ.size()) fail(ErrorKind::kUsage, "base stream coords/occ mismatch");
}

std::vector<std::uint8_t> serialize_frame(const FramePacket& p) {
  validate_packet(p);
  const auto lens = p.stream_lengths();
  ByteWriter w;
  w.bytes(kFrameTitle);
  w.u32(p.stream_count());
  w.u32(p.pos_q);
  w.u32(p.point_count);
  for (auto l : lens) w.u32(l);

  const auto& m = p.metadata;
  w.u32(m.depths);
  w.u32(m.shallow_d);
  w.u32(m.fp_inv_step);
  w.u32(m.fp_b);
  w.u32(m.fp_kmax);
  w.u64(m.model_id);

  w.u32(checked_u32(p.base.coords.size(), "n0"));
  for (const auto& c : p.base.coords) {
    w.i32(c.x);
    w.i32(c.y);
    w.i32(c.z);
  }
  w.bytes(p.base.occ);
  for (const auto& s : p.shallow) {
    w.bytes(s.s0);
    w.bytes(s.s1);
  }
  for (const auto& d : p.deep) write_deep(w, d);
  return w.take();
}

FramePacket parse_frame(std::span<const std::uint8_t> bytes, bool strict) {
  std::size_t consumed = 0;
  auto p = parse_impl(bytes, consumed);
  if (strict && consumed != bytes.size()) {
    throw FormatError(ErrorKind::kFormat, "trailing bytes after frame", consumed);
  }
  return p;
}

FramePacket parse_frame_prefix(std::span<const std::uint8_t> bytes, std::size_t& consumed) {
  return parse_impl(bytes, consumed);
}

}  // namespace lean3d
