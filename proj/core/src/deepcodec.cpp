#include "lean3d/deepcodec.hpp"

#include <bit>
#include <string>

#include "lean3d/error.hpp"

namespace lean3d {
namespace {

class BitWriter {
 public:
  void put(std::uint64_t value, std::uint32_t bits) {
    for (std::uint32_t b = 0; b < bits; ++b) set(pos_++, (value >> b) & 1u);
  }
  void set(std::size_t bit, bool on) {
    if (bytes_.size() <= bit / 8) bytes_.resize(bit / 8 + 1, 0);
    if (on) bytes_[bit / 8] |= static_cast<std::uint8_t>(1u << (bit % 8));
  }
  std::vector<std::uint8_t> take(std::size_t total_bits) {
    bytes_.resize((total_bits + 7) / 8, 0);
    return std::move(bytes_);
  }

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::uint64_t read_bits(std::span<const std::uint8_t> bytes, std::size_t bit_pos, std::uint32_t bits) {
  std::uint64_t v = 0;
  for (std::uint32_t b = 0; b < bits; ++b) {
    const std::size_t p = bit_pos + b;
    v |= static_cast<std::uint64_t>((bytes[p / 8] >> (p % 8)) & 1u) << b;
  }
  return v;
}

void corrupt(const std::string& what) { fail(ErrorKind::kCorruptStream, "deep stream: " + what); }

}  // namespace

OccupancyPartition partition(std::span<const std::uint8_t> occ) {
  OccupancyPartition out;
  for (std::size_t i = 0; i < occ.size(); ++i) {
    const auto o = occ[i];
    if (o == 0) fail(ErrorKind::kInvariant, "occupancy code 0 at position " + std::to_string(i));
    if (std::has_single_bit(o)) {
      out.unary_positions.push_back(static_cast<std::uint32_t>(i));
      out.unary_k.push_back(static_cast<std::uint8_t>(std::countr_zero(o)));
    } else {
      out.nonunary_positions.push_back(static_cast<std::uint32_t>(i));
    }
  }
  return out;
}

std::uint32_t elias_fano_low_bits(std::uint64_t count, std::uint64_t universe) {
  if (count == 0 || universe <= count) return 0;
  std::uint32_t l = 0;
  while ((count << (l + 1)) <= universe) ++l;
  return l;
}

std::size_t elias_fano_high_bytes(std::uint64_t count, std::uint64_t universe, std::uint32_t low_bits) {
  return static_cast<std::size_t>((count + (universe >> low_bits) + 1 + 7) / 8);
}

std::size_t elias_fano_low_bytes(std::uint64_t count, std::uint32_t low_bits) {
  return static_cast<std::size_t>((count * low_bits + 7) / 8);
}

EliasFano ef_encode(std::span<const std::uint32_t> indices, std::uint32_t universe) {
  if (universe < 1) fail(ErrorKind::kUsage, "Elias-Fano universe must be at least 1");
  const std::uint64_t m = indices.size();
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= universe) fail(ErrorKind::kUsage, "Elias-Fano index out of range");
    if (i > 0 && indices[i] <= indices[i - 1]) fail(ErrorKind::kUsage, "Elias-Fano indices must be strictly increasing");
  }
  EliasFano ef;
  ef.low_bits = elias_fano_low_bits(m, universe);
  const std::size_t high_bits = static_cast<std::size_t>(m + (universe >> ef.low_bits) + 1);

  BitWriter low, high;
  const std::uint32_t mask = (1u << ef.low_bits) - 1;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    low.put(indices[i] & mask, ef.low_bits);
    high.set((indices[i] >> ef.low_bits) + i, true);
  }
  ef.low = low.take(static_cast<std::size_t>(m) * ef.low_bits);
  ef.high = high.take(high_bits);
  return ef;
}

std::vector<std::uint32_t> ef_decode(const EliasFano& ef, std::uint32_t count, std::uint32_t universe) {
  if (ef.low_bits != elias_fano_low_bits(count, universe)) corrupt("Elias-Fano low width does not match counts");
  if (ef.low.size() != elias_fano_low_bytes(count, ef.low_bits)) corrupt("Elias-Fano low part has wrong length");
  if (ef.high.size() != elias_fano_high_bytes(count, universe, ef.low_bits)) {
    corrupt("Elias-Fano high part has wrong length");
  }
  std::vector<std::uint32_t> out;
  out.reserve(count);
  const std::size_t total_bits = ef.high.size() * 8;
  std::size_t bit = 0;
  for (std::uint32_t i = 0; i < count; ++i) {
    while (bit < total_bits && !((ef.high[bit / 8] >> (bit % 8)) & 1u)) ++bit;
    if (bit >= total_bits) corrupt("Elias-Fano high vector exhausted");
    const std::uint64_t hi = bit - i;
    const std::uint64_t value = (hi << ef.low_bits) | read_bits(ef.low, std::size_t{i} * ef.low_bits, ef.low_bits);
    if (value >= universe) corrupt("Elias-Fano index out of range");
    if (!out.empty() && value <= out.back()) corrupt("Elias-Fano indices not increasing");
    out.push_back(static_cast<std::uint32_t>(value));
    ++bit;
  }
  for (; bit < total_bits; ++bit) {
    if ((ef.high[bit / 8] >> (bit % 8)) & 1u) corrupt("Elias-Fano high vector has extra elements");
  }
  return out;
}

std::vector<std::uint8_t> pack3(std::span<const std::uint8_t> values) {
  BitWriter w;
  for (auto v : values) {
    if (v > 7) fail(ErrorKind::kUsage, "pack3 value exceeds 7");
    w.put(v, 3);
  }
  return w.take(values.size() * 3);
}

std::vector<std::uint8_t> unpack3(std::span<const std::uint8_t> bytes, std::size_t count) {
  if (bytes.size() != (count * 3 + 7) / 8) corrupt("packed child-id length does not match count");
  std::vector<std::uint8_t> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = static_cast<std::uint8_t>(read_bits(bytes, i * 3, 3));
  return out;
}

DeepLevelStream encode_deep_level(std::span<const std::uint8_t> occ) {
  const auto part = partition(occ);
  DeepLevelStream s;
  s.node_count = static_cast<std::uint32_t>(occ.size());
  s.nonunary_count = static_cast<std::uint32_t>(part.nonunary_positions.size());
  if (s.node_count > 0) {
    auto ef = ef_encode(part.nonunary_positions, s.node_count);
    s.low_bits = ef.low_bits;
    s.ef_high = std::move(ef.high);
    s.ef_low = std::move(ef.low);
  } else {
    s.ef_high.assign(1, 0);  // M + (0 >> 0) + 1 = 1 bit
  }
  s.unary_k = pack3(part.unary_k);
  s.nonunary_occ.reserve(part.nonunary_positions.size());
  for (auto p : part.nonunary_positions) s.nonunary_occ.push_back(occ[p]);
  return s;
}

std::vector<std::uint8_t> decode_deep_level(const DeepLevelStream& s) {
  if (s.nonunary_count > s.node_count) corrupt("non-unary count exceeds node count");
  if (s.nonunary_occ.size() != s.nonunary_count) corrupt("non-unary byte count mismatch");
  const std::uint32_t unary_count = s.node_count - s.nonunary_count;

  std::vector<std::uint32_t> split;
  if (s.node_count > 0) {
    split = ef_decode({s.low_bits, s.ef_high, s.ef_low}, s.nonunary_count, s.node_count);
  } else if (s.low_bits != 0 || s.ef_low.size() != 0 || s.ef_high.size() != 1 || s.ef_high[0] != 0) {
    corrupt("empty level with non-empty Elias-Fano data");
  }
  const auto ks = unpack3(s.unary_k, unary_count);

  std::vector<std::uint8_t> occ(s.node_count);
  std::size_t next_split = 0, next_unary = 0;
  for (std::uint32_t i = 0; i < s.node_count; ++i) {
    if (next_split < split.size() && split[next_split] == i) {
      const auto o = s.nonunary_occ[next_split++];
      if (std::popcount(o) < 2) corrupt("non-unary occupancy byte has popcount < 2");
      occ[i] = o;
    } else {
      occ[i] = static_cast<std::uint8_t>(1u << ks[next_unary++]);
    }
  }
  return occ;
}

std::size_t deep_payload_size(std::uint32_t node_count, std::uint32_t nonunary_count) {
  const std::uint64_t u = node_count, m = nonunary_count;
  const std::uint32_t l = elias_fano_low_bits(m, u);
  return static_cast<std::size_t>((3 * (u - m) + 7) / 8 + m) + elias_fano_high_bytes(m, u, l) +
         elias_fano_low_bytes(m, l);
}

}  // namespace lean3d
