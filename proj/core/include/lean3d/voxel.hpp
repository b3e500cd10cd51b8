#pragma once

#include <compare>
#include <cstdint>

namespace lean3d {

/// Integer lattice coordinate. Ordering is the canonical coding order:
/// lexicographic by (z, y, x), ascending.
struct Voxel {
  std::int32_t x = 0;
  std::int32_t y = 0;
  std::int32_t z = 0;

  friend constexpr bool operator==(const Voxel&, const Voxel&) = default;
  friend constexpr std::strong_ordering operator<=>(const Voxel& a, const Voxel& b) {
    if (auto c = a.z <=> b.z; c != 0) return c;
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.x <=> b.x;
  }
};

}  // namespace lean3d
