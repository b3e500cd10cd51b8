#include "lean3d/hierarchy.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>

#include "lean3d/error.hpp"

namespace lean3d {
namespace {

constexpr std::int64_t kMin = std::numeric_limits<std::int32_t>::min();
constexpr std::int64_t kMax = std::numeric_limits<std::int32_t>::max();

std::int32_t child_axis(std::int32_t parent, int bit) {
  const std::int64_t c = 2 * static_cast<std::int64_t>(parent) + bit;
  if (c < kMin || c > kMax) fail(ErrorKind::kInvariant, "child coordinate overflows the int32 lattice");
  return static_cast<std::int32_t>(c);
}

Voxel child_at(const Voxel& v, int k) {
  return {child_axis(v.x, k & 1), child_axis(v.y, (k >> 1) & 1), child_axis(v.z, (k >> 2) & 1)};
}

void check_level(const VoxelLevel& level) {
  if (level.coords.size() != level.occ.size()) {
    fail(ErrorKind::kInvariant, "level has mismatched coordinate and occupancy counts");
  }
}

int bit_length_of_offset(std::int32_t c) {
  // number of halvings until c lands in {-1, 0}
  const std::uint32_t magnitude = c < 0 ? ~static_cast<std::uint32_t>(c) : static_cast<std::uint32_t>(c);
  return std::bit_width(magnitude);
}

}  // namespace

VoxelLevel bpa(std::span<const Voxel> children) {
  if (children.empty()) fail(ErrorKind::kUsage, "bpa requires at least one child coordinate");

  struct Tagged {
    Voxel parent;
    std::uint8_t bit;
  };
  std::vector<Tagged> tagged;
  tagged.reserve(children.size());
  for (const auto& u : children) {
    tagged.push_back({parent_of(u), static_cast<std::uint8_t>(1u << child_index(u))});
  }
  std::sort(tagged.begin(), tagged.end(), [](const Tagged& a, const Tagged& b) { return a.parent < b.parent; });

  VoxelLevel out;
  for (const auto& t : tagged) {
    if (!out.coords.empty() && out.coords.back() == t.parent) {
      out.occ.back() |= t.bit;
    } else {
      out.coords.push_back(t.parent);
      out.occ.push_back(t.bit);
    }
  }
  return out;
}

std::vector<ChildNode> bce_with_context(const VoxelLevel& level) {
  check_level(level);
  std::size_t total = 0;
  for (auto o : level.occ) {
    if (o == 0) fail(ErrorKind::kInvariant, "occupancy code 0 on an active node");
    total += static_cast<std::size_t>(std::popcount(o));
  }
  std::vector<ChildNode> out;
  out.reserve(total);
  for (std::size_t i = 0; i < level.coords.size(); ++i) {
    const auto o = level.occ[i];
    for (int k = 0; k < 8; ++k) {
      if (o & (1u << k)) out.push_back({child_at(level.coords[i], k), static_cast<std::uint8_t>(k), o});
    }
  }
  std::sort(out.begin(), out.end(), [](const ChildNode& a, const ChildNode& b) { return a.coord < b.coord; });
  return out;
}

std::vector<Voxel> bce(const VoxelLevel& level) {
  auto nodes = bce_with_context(level);
  std::vector<Voxel> out;
  out.reserve(nodes.size());
  for (const auto& n : nodes) out.push_back(n.coord);
  // distinct parents or slots always yield distinct children, but a level
  // that violates uniqueness of coords must not produce duplicates
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t default_depth(std::span<const Voxel> leaves) {
  int bits = 1;
  for (const auto& v : leaves) {
    bits = std::max({bits, bit_length_of_offset(v.x), bit_length_of_offset(v.y), bit_length_of_offset(v.z)});
  }
  return static_cast<std::size_t>(bits);
}

OccupancyPyramid build_pyramid(std::span<const Voxel> leaves, std::size_t depth) {
  if (depth < 1) fail(ErrorKind::kParameter, "pyramid depth must be at least 1");
  if (leaves.empty()) fail(ErrorKind::kUsage, "cannot build a pyramid over an empty voxel set");
  OccupancyPyramid pyr;
  pyr.levels.resize(depth);
  pyr.levels[depth - 1] = bpa(leaves);
  for (std::size_t d = depth - 1; d-- > 0;) pyr.levels[d] = bpa(pyr.levels[d + 1].coords);
  return pyr;
}

std::vector<Voxel> expand_pyramid(const OccupancyPyramid& pyramid) {
  if (pyramid.levels.empty()) return {};
  return bce(pyramid.levels.back());
}

double unary_fraction(const VoxelLevel& level) {
  if (level.occ.empty()) fail(ErrorKind::kUsage, "unary fraction of an empty level");
  std::size_t unary = 0;
  for (auto o : level.occ) unary += std::has_single_bit(o) ? 1 : 0;
  return static_cast<double>(unary) / static_cast<double>(level.occ.size());
}

std::vector<double> unary_fractions(const OccupancyPyramid& pyramid) {
  std::vector<double> out;
  out.reserve(pyramid.depth());
  for (const auto& l : pyramid.levels) out.push_back(unary_fraction(l));
  return out;
}

std::size_t select_split_depth(std::span<const double> fractions, double threshold) {
  for (std::size_t d = 0; d < fractions.size(); ++d) {
    if (fractions[d] > threshold) return d;
  }
  return fractions.size();
}

std::size_t select_split_depth(const OccupancyPyramid& pyramid, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) fail(ErrorKind::kParameter, "split threshold must lie in (0, 1)");
  return select_split_depth(unary_fractions(pyramid), threshold);
}

}  // namespace lean3d
