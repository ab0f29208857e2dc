#pragma once

#include <span>
#include <vector>

#include "physkit/forces/forces.hpp"
#include "physkit/mpm/sdf.hpp"

namespace physkit::forces {

struct LaserSurface {
  const mpm::VoxelSDF* sdf = nullptr;
  bool mirror = false;
};

struct LaserPath {
  std::vector<Vec3> points;  // origin, then every hit point, then the end point
  int bounces = 0;
  bool absorbed = false;     // ended on a non-mirror surface
};

/// Sphere-traces a beam through the scene. Mirrors reflect it; any other
/// surface absorbs it. Stops after `max_bounces` reflections or once the
/// beam has travelled `max_distance`.
inline LaserPath trace_laser(const Vec3& origin, const Vec3& direction, std::span<const LaserSurface> surfaces,
                             double max_distance, int max_bounces = 16, double hit_epsilon = 1e-4) {
  if (std::abs(direction.norm() - 1.0) > 1e-9) throw Error(Errc::invalid_config, "laser direction must be unit");
  LaserPath path;
  path.points.push_back(origin);
  Vec3 x = origin, d = direction;
  double travelled = 0.0;
  while (travelled < max_distance) {
    double nearest = std::numeric_limits<double>::infinity();
    const LaserSurface* hit = nullptr;
    mpm::VoxelSDF::Sample hit_sample{0.0, Vec3::Zero()};
    for (const auto& s : surfaces) {
      const auto sample = s.sdf->sample(x);
      if (sample.distance < nearest) {
        nearest = sample.distance;
        hit = &s;
        hit_sample = sample;
      }
    }
    if (hit && nearest < hit_epsilon && hit_sample.normal.dot(d) < 0.0) {
      path.points.push_back(x);
      if (!hit->mirror) {
        path.absorbed = true;
        return path;
      }
      if (path.bounces == max_bounces) return path;
      d = reflect_ray(d, hit_sample.normal);
      ++path.bounces;
      x += 2.0 * hit_epsilon * d;
      travelled += 2.0 * hit_epsilon;
      continue;
    }
    const double stride = std::max(std::abs(nearest), hit_epsilon) * (nearest < hit_epsilon ? 1.0 : 0.9);
    const double advance = std::min(std::isfinite(stride) ? stride : max_distance, max_distance - travelled);
    x += advance * d;
    travelled += advance;
  }
  path.points.push_back(x);
  return path;
}

}  // namespace physkit::forces
