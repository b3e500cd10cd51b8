#include "lean3d/synth.hpp"

#include <cmath>
#include <numbers>

namespace lean3d::synth {

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

PointCloud random_cloud(Rng& rng, std::size_t count, double lo, double hi, std::size_t duplicates) {
  PointCloud c;
  c.points.reserve(count);
  const std::size_t fresh = count > duplicates ? count - duplicates : (count > 0 ? 1 : 0);
  for (std::size_t i = 0; i < fresh; ++i) {
    c.points.push_back({rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi)});
  }
  while (c.points.size() < count) c.points.push_back(c.points[rng.below(fresh)]);
  return c;
}

PointCloud structured_scene(Rng& rng, const SceneParams& params) {
  PointCloud c;
  c.points.reserve(params.points);
  const double e = params.extent;
  const std::size_t ground = params.points * 5 / 10;
  const std::size_t walls = params.points * 3 / 10;
  const std::size_t objects = params.points - ground - walls;

  const double ground_z = rng.uniform(-0.2 * e, -0.05 * e);
  for (std::size_t i = 0; i < ground; ++i) {
    c.points.push_back({rng.uniform(-e, e), rng.uniform(-e, e), ground_z + 0.002 * e * rng.normal()});
  }

  const std::size_t n_walls = 2 + rng.below(3);
  for (std::size_t w = 0; w < n_walls; ++w) {
    const bool along_x = rng.below(2) == 0;
    const double offset = rng.uniform(-0.9 * e, 0.9 * e);
    const double a0 = rng.uniform(-e, 0.0), a1 = rng.uniform(0.0, e);
    const double height = rng.uniform(0.1 * e, 0.4 * e);
    for (std::size_t i = 0; i < walls / n_walls; ++i) {
      const double a = rng.uniform(a0, a1);
      const double z = ground_z + rng.uniform(0.0, height);
      if (along_x) {
        c.points.push_back({a, offset, z});
      } else {
        c.points.push_back({offset, a, z});
      }
    }
  }

  const std::size_t n_objects = 4 + rng.below(8);
  for (std::size_t o = 0; o < n_objects; ++o) {
    const double cx = rng.uniform(-0.8 * e, 0.8 * e), cy = rng.uniform(-0.8 * e, 0.8 * e);
    const double sigma = rng.uniform(0.01 * e, 0.04 * e);
    for (std::size_t i = 0; i < objects / n_objects; ++i) {
      c.points.push_back({cx + sigma * rng.normal(), cy + sigma * rng.normal(),
                          ground_z + std::abs(sigma * rng.normal())});
    }
  }
  return c;
}

}  // namespace lean3d::synth
