#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lean3d/voxel.hpp"

namespace lean3d {

/// One hierarchy level: canonical-ordered active coordinates and the 8-bit
/// occupancy code of each (bit k set iff child slot k is occupied).
struct VoxelLevel {
  std::vector<Voxel> coords;
  std::vector<std::uint8_t> occ;

  std::size_t size() const { return coords.size(); }
  friend bool operator==(const VoxelLevel&, const VoxelLevel&) = default;
};

/// levels[0] is the coarsest level; bce(levels[L-1]) is the leaf set.
struct OccupancyPyramid {
  std::vector<VoxelLevel> levels;

  std::size_t depth() const { return levels.size(); }
  friend bool operator==(const OccupancyPyramid&, const OccupancyPyramid&) = default;
};

/// A node produced by child expansion, carrying what the shallow predictor
/// may condition on.
struct ChildNode {
  Voxel coord;
  std::uint8_t child_index = 0;  // k in 0..7 within the parent
  std::uint8_t parent_occ = 0;
};

/// Within-parent child slot: (x mod 2) + 2 (y mod 2) + 4 (z mod 2), non-negative modulo.
constexpr std::uint8_t child_index(const Voxel& u) {
  return static_cast<std::uint8_t>((u.x & 1) | ((u.y & 1) << 1) | ((u.z & 1) << 2));
}

/// Floor division by two on every axis (arithmetic shift).
constexpr Voxel parent_of(const Voxel& u) { return {u.x >> 1, u.y >> 1, u.z >> 1}; }

/// Bitwise parent aggregation. Input must be non-empty; order does not matter.
VoxelLevel bpa(std::span<const Voxel> children);

/// Bitwise child expansion; output sorted canonically.
std::vector<Voxel> bce(const VoxelLevel& level);

/// Child expansion that also records each child's slot and parent code.
std::vector<ChildNode> bce_with_context(const VoxelLevel& level);

/// Smallest L >= 1 such that every leaf shifted right by L lands in {-1, 0}
/// on every axis, so the coarsest level holds at most 8 nodes.
std::size_t default_depth(std::span<const Voxel> leaves);

OccupancyPyramid build_pyramid(std::span<const Voxel> leaves, std::size_t depth);

/// Chained BCE from level 0 down to the leaves.
std::vector<Voxel> expand_pyramid(const OccupancyPyramid& pyramid);

double unary_fraction(const VoxelLevel& level);
std::vector<double> unary_fractions(const OccupancyPyramid& pyramid);

/// Smallest d with fraction[d] > threshold; fractions.size() if none.
std::size_t select_split_depth(std::span<const double> fractions, double threshold = 0.6);
std::size_t select_split_depth(const OccupancyPyramid& pyramid, double threshold = 0.6);

}  // namespace lean3d
