#pragma once

#include <string>
#include <vector>

#include "lean3d/voxel.hpp"

namespace lean3d {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Point3&, const Point3&) = default;
};

struct PointCloud {
  std::vector<Point3> points;
};

/// Unique voxels in canonical (z, y, x) order plus the step they were quantized with.
struct QuantizedCloud {
  std::vector<Voxel> voxels;
  double q = 1.0;
};

enum class Reconstruction {
  kCorner,  // x * q; exact inverse of quantize
  kCenter,  // (x + 0.5) * q; for distortion experiments
};

enum class PointFormat { kKittiBin, kPlyAscii };

/// Componentwise floor(p / q), deduplicated. Throws kParameter for q <= 0 and
/// kInput for non-finite coordinates or results outside the int32 lattice.
QuantizedCloud quantize(const PointCloud& cloud, double q);

PointCloud dequantize(const std::vector<Voxel>& voxels, double q,
                      Reconstruction mode = Reconstruction::kCorner);

/// Sorts into canonical order and removes duplicates in place.
void canonicalize(std::vector<Voxel>& voxels);

/// Picks the format from the extension: ".bin" is KITTI, ".ply" is ASCII PLY.
PointFormat format_from_path(const std::string& path);

PointCloud load_points(const std::string& path, PointFormat format);
PointCloud load_points(const std::string& path);

PointCloud parse_kitti_bin(const std::vector<std::uint8_t>& bytes);
PointCloud parse_ply_ascii(const std::string& text);

void save_points(const std::string& path, const PointCloud& cloud, PointFormat format);
void save_points(const std::string& path, const PointCloud& cloud);

}  // namespace lean3d
