#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "lean3d/geometry.hpp"

namespace lean3d::synth {

/// mt19937_64 with hand-written conversions; std distributions are
/// implementation-defined and would make generated data differ by platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }
  /// Standard normal via Box-Muller.
  double normal();

 private:
  std::mt19937_64 engine_;
};

/// `count` points uniform in [lo, hi)^3; `duplicates` of them are exact copies
/// of earlier points, so the voxel count shrinks under any quantizer.
PointCloud random_cloud(Rng& rng, std::size_t count, double lo, double hi, std::size_t duplicates = 0);

struct SceneParams {
  double extent = 4096.0;     // half-width of the scene in lattice-scale units
  std::size_t points = 30000;
};

/// Ground plane, a few wall planes, and Gaussian object clusters, roughly
/// mimicking a LiDAR sweep: dense coarse structure that thins out at fine scales.
PointCloud structured_scene(Rng& rng, const SceneParams& params = {});

}  // namespace lean3d::synth
