#include "lean3d/predictor.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "lean3d/byte_io.hpp"
#include "lean3d/error.hpp"

namespace lean3d {
namespace {

constexpr char kMagic[4] = {'L', '3', 'D', 'M'};

using Counts = std::array<std::uint64_t, kAlphabetSize>;

NodeContext context_of(std::size_t depth, const ChildNode& node) {
  return {static_cast<std::uint8_t>(depth), node.child_index, node.parent_occ};
}

QuantizedLogits logits_from_counts(const Counts& counts) {
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  std::array<double, kAlphabetSize> z{};
  for (int r = 0; r < kAlphabetSize; ++r) {
    z[r] = std::log(static_cast<double>(counts[r] + 1) / static_cast<double>(total + kAlphabetSize));
  }
  auto logits = quantize_logits(z);

  // Rounding can merge the top count with a lower-indexed, less frequent
  // symbol; nudge so the most frequent symbol keeps rank 0.
  int best = 0;
  for (int r = 1; r < kAlphabetSize; ++r) {
    if (counts[r] > counts[best]) best = r;
  }
  for (int r = 0; r < best; ++r) {
    if (logits[r] >= logits[best] && logits[best] < kLogitMax) logits[best] = static_cast<std::int16_t>(logits[r] + 1);
  }
  return logits;
}

/// Shallow levels paired with their expanded children (node order and contexts).
template <typename Visit>
void for_each_shallow_node(const OccupancyPyramid& pyramid, std::size_t split, Visit&& visit) {
  const auto range = shallow_levels(pyramid.depth(), split);
  for (std::size_t d = range.begin; d < range.end; ++d) {
    const auto nodes = bce_with_context(pyramid.levels[d - 1]);
    const auto& level = pyramid.levels[d];
    if (nodes.size() != level.size()) fail(ErrorKind::kInvariant, "pyramid levels are not BCE-consistent");
    for (std::size_t i = 0; i < nodes.size(); ++i) visit(d, context_of(d, nodes[i]), level.occ[i]);
  }
}

double kl_term(const IntegerCdf& q, const IntegerCdf& p) {
  double sum = 0.0;
  for (unsigned r = 0; r < kAlphabetSize; ++r) {
    const double qr = static_cast<double>(q.freq(r)) / kProbScale;
    const double pr = static_cast<double>(p.freq(r)) / kProbScale;
    sum += qr * std::log(qr / pr);
  }
  return sum / std::log(2.0);
}

}  // namespace

std::uint32_t LogitTableModel::key(const NodeContext& ctx, unsigned s0) {
  return (std::uint32_t{ctx.depth} << 24) | (std::uint32_t{ctx.child_index} << 16) |
         (std::uint32_t{ctx.parent_occ} << 8) | (s0 & 0xFFu);
}

QuantizedLogits LogitTableModel::predict_s0(const NodeContext& ctx) const {
  auto it = s0_.find(key(ctx, 0));
  return it == s0_.end() ? QuantizedLogits{} : it->second;
}

QuantizedLogits LogitTableModel::predict_s1(const NodeContext& ctx, unsigned s0) const {
  auto it = s1_.find(key(ctx, s0));
  return it == s1_.end() ? QuantizedLogits{} : it->second;
}

void LogitTableModel::set_s0(const NodeContext& ctx, const QuantizedLogits& logits) { s0_[key(ctx, 0)] = logits; }

void LogitTableModel::set_s1(const NodeContext& ctx, unsigned s0, const QuantizedLogits& logits) {
  if (s0 >= kAlphabetSize) fail(ErrorKind::kUsage, "s0 out of range");
  s1_[key(ctx, s0)] = logits;
}

std::vector<std::uint8_t> LogitTableModel::serialize() const {
  ByteWriter w;
  w.bytes(std::string_view(kMagic, 4));
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(s0_.size()));
  w.u32(static_cast<std::uint32_t>(s1_.size()));
  for (const auto* table : {&s0_, &s1_}) {
    for (const auto& [k, logits] : *table) {
      w.u32(k);
      for (auto v : logits) w.i16(v);
    }
  }
  return w.take();
}

LogitTableModel LogitTableModel::parse(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  auto magic = in.bytes(4, "model magic");
  if (!std::equal(magic.begin(), magic.end(), kMagic)) throw FormatError(ErrorKind::kFormat, "not a model file", 0);
  if (const auto v = in.u32(); v != kVersion) {
    throw FormatError(ErrorKind::kFormat, "unsupported model version " + std::to_string(v), 4);
  }
  const std::uint64_t n0 = in.u32();
  const std::uint64_t n1 = in.u32();
  constexpr std::size_t kRecord = 4 + 2 * kAlphabetSize;
  if ((n0 + n1) * kRecord != in.remaining()) {
    throw FormatError(ErrorKind::kFormat, "model record count does not match file size", in.offset());
  }
  LogitTableModel model;
  for (auto* table : {&model.s0_, &model.s1_}) {
    const std::uint64_t n = table == &model.s0_ ? n0 : n1;
    std::uint32_t prev = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      const std::size_t at = in.offset();
      const std::uint32_t k = in.u32();
      if (i > 0 && k <= prev) throw FormatError(ErrorKind::kFormat, "model keys not strictly sorted", at);
      if (table == &model.s0_ && (k & 0xFFu) != 0) throw FormatError(ErrorKind::kFormat, "s0 key carries s0", at);
      if (((k >> 16) & 0xFFu) > 7 || (k & 0xFFu) >= kAlphabetSize) {
        throw FormatError(ErrorKind::kFormat, "model key out of range", at);
      }
      prev = k;
      QuantizedLogits logits{};
      for (auto& v : logits) v = in.i16();
      table->emplace_hint(table->end(), k, logits);
    }
  }
  return model;
}

void LogitTableModel::save(const std::string& path) const { write_file(path, serialize()); }

LogitTableModel LogitTableModel::load(const std::string& path) { return parse(read_file(path)); }

std::uint64_t LogitTableModel::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (auto b : serialize()) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

LevelRange shallow_levels(std::size_t depth, std::size_t split) {
  const std::size_t end = std::min(split, depth);
  return {1, std::max<std::size_t>(1, end)};
}

LogitTableModel fit_table(std::span<const OccupancyPyramid> pyramids, std::span<const std::size_t> splits) {
  if (pyramids.size() != splits.size()) fail(ErrorKind::kUsage, "one split depth per pyramid is required");
  std::map<std::uint32_t, Counts> c0;
  std::map<std::uint32_t, Counts> c1;
  auto ckey = [](const NodeContext& ctx, unsigned s0) {
    return (std::uint32_t{ctx.depth} << 24) | (std::uint32_t{ctx.child_index} << 16) |
           (std::uint32_t{ctx.parent_occ} << 8) | s0;
  };
  for (std::size_t p = 0; p < pyramids.size(); ++p) {
    for_each_shallow_node(pyramids[p], splits[p], [&](std::size_t, const NodeContext& ctx, std::uint8_t occ) {
      const unsigned s0 = occ & 0x0Fu, s1 = occ >> 4;
      ++c0[ckey(ctx, 0)][s0];
      ++c1[ckey(ctx, s0)][s1];
    });
  }
  LogitTableModel model;
  auto unkey = [](std::uint32_t k) {
    return NodeContext{static_cast<std::uint8_t>(k >> 24), static_cast<std::uint8_t>(k >> 16),
                       static_cast<std::uint8_t>(k >> 8)};
  };
  for (const auto& [k, counts] : c0) model.set_s0(unkey(k), logits_from_counts(counts));
  for (const auto& [k, counts] : c1) model.set_s1(unkey(k), k & 0xFFu, logits_from_counts(counts));
  return model;
}

std::vector<LevelRate> rate_breakdown(const LogitTableModel& model, const OccupancyPyramid& pyramid,
                                      std::size_t split) {
  std::vector<LevelRate> out;
  for_each_shallow_node(pyramid, split, [&](std::size_t d, const NodeContext& ctx, std::uint8_t occ) {
    if (out.empty() || out.back().level != d) out.push_back({d, 0, 0.0, 0.0});
    auto& r = out.back();
    const unsigned s0 = occ & 0x0Fu, s1 = occ >> 4;
    ++r.nodes;
    r.s0_bits += symbol_bits(logits_to_cdf(model.predict_s0(ctx)), s0);
    r.s1_bits += symbol_bits(logits_to_cdf(model.predict_s1(ctx, s0)), s1);
  });
  return out;
}

double rate_bits(const LogitTableModel& model, const OccupancyPyramid& pyramid, std::size_t split) {
  double total = 0.0;
  for (const auto& r : rate_breakdown(model, pyramid, split)) total += r.s0_bits + r.s1_bits;
  return total;
}

double kl_bits(const LogitTableModel& model_a, const LogitTableModel& model_b, const OccupancyPyramid& pyramid,
               std::size_t split) {
  double total = 0.0;
  for_each_shallow_node(pyramid, split, [&](std::size_t, const NodeContext& ctx, std::uint8_t occ) {
    const unsigned s0 = occ & 0x0Fu;
    total += kl_term(logits_to_cdf(model_a.predict_s0(ctx)), logits_to_cdf(model_b.predict_s0(ctx)));
    total += kl_term(logits_to_cdf(model_a.predict_s1(ctx, s0)), logits_to_cdf(model_b.predict_s1(ctx, s0)));
  });
  return total;
}

}  // namespace lean3d
