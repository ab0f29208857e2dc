#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "physkit/error.hpp"
#include "physkit/mpm/mesh.hpp"
#include "physkit/parallel.hpp"

namespace physkit::mpm {

enum class ContactMode { sticky, slip, separate };

inline std::string to_string(ContactMode m) {
  switch (m) {
    case ContactMode::sticky: return "sticky";
    case ContactMode::slip: return "slip";
    case ContactMode::separate: return "separate";
  }
  return "?";
}

inline ContactMode parse_contact_mode(const std::string& s) {
  if (s == "sticky") return ContactMode::sticky;
  if (s == "slip") return ContactMode::slip;
  if (s == "separate") return ContactMode::separate;
  throw Error(Errc::invalid_config, "unknown contact mode '" + s + "'");
}

/// Projects a node velocity against a surface with outward normal n.
/// Friction is Coulomb scaling of the tangential part and only acts in slip
/// and separate modes.
inline Vec3 apply_contact(const Vec3& v, const Vec3& n, ContactMode mode, double friction = 0.0) {
  if (mode == ContactMode::sticky) return Vec3::Zero();
  const double vn = v.dot(n);
  if (mode == ContactMode::separate && vn >= 0.0) return v;
  Vec3 out = v - vn * n;
  if (friction > 0.0) {
    const double vt = out.norm();
    if (vt > 0.0) out *= std::max(0.0, 1.0 - friction * std::abs(vn) / vt);
  }
  return out;
}

/// Regular grid of signed distances (negative inside) with unit normals.
struct VoxelSDF {
  Vec3 origin = Vec3::Zero();
  double spacing = 1.0;
  std::array<int, 3> dims{0, 0, 0};  // node counts per axis
  std::vector<double> distance;
  std::vector<Vec3> normal;
  ContactMode contact_mode = ContactMode::sticky;
  double friction = 0.0;

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * dims[1] + j) * dims[0] + i;
  }
  Vec3 node(int i, int j, int k) const { return origin + spacing * Vec3(i, j, k); }
  Vec3 extent() const { return spacing * Vec3(dims[0] - 1, dims[1] - 1, dims[2] - 1); }

  struct Sample {
    double distance;
    Vec3 normal;
  };

  /// Trilinear sample. Points outside the grid get the value at the nearest
  /// grid point plus the distance to the grid box.
  Sample sample(const Vec3& p) const {
    const Vec3 hi = origin + extent();
    const Vec3 q = p.cwiseMax(origin).cwiseMin(hi);
    const double outside = (p - q).norm();
    const Vec3 g = (q - origin) / spacing;
    std::array<int, 3> base{};
    Vec3 f;
    for (int a = 0; a < 3; ++a) {
      base[a] = std::clamp(static_cast<int>(std::floor(g[a])), 0, std::max(dims[a] - 2, 0));
      f[a] = std::clamp(g[a] - base[a], 0.0, 1.0);
    }
    double d = 0.0;
    Vec3 n = Vec3::Zero();
    for (int c = 0; c < 8; ++c) {
      const int di = c & 1, dj = (c >> 1) & 1, dk = (c >> 2) & 1;
      const int i = std::min(base[0] + di, dims[0] - 1), j = std::min(base[1] + dj, dims[1] - 1),
                k = std::min(base[2] + dk, dims[2] - 1);
      const double w = (di ? f[0] : 1 - f[0]) * (dj ? f[1] : 1 - f[1]) * (dk ? f[2] : 1 - f[2]);
      d += w * distance[index(i, j, k)];
      n += w * normal[index(i, j, k)];
    }
    if (outside > 0.0) {
      d += outside;
      n = (p - q) / outside;
    }
    const double len = n.norm();
    return {d, len > 0.0 ? Vec3(n / len) : Vec3::Zero()};
  }
};

/// Central-difference gradients of the distance field, normalised.
inline void compute_normals(VoxelSDF& sdf) {
  const auto& D = sdf.dims;
  sdf.normal.assign(sdf.distance.size(), Vec3::Zero());
  parallel_for(static_cast<std::size_t>(D[2]), [&](std::size_t kk) {
    const int k = static_cast<int>(kk);
    for (int j = 0; j < D[1]; ++j)
      for (int i = 0; i < D[0]; ++i) {
        const std::array<int, 3> c{i, j, k};
        Vec3 g;
        for (int a = 0; a < 3; ++a) {
          auto lo = c, hi = c;
          lo[a] = std::max(c[a] - 1, 0);
          hi[a] = std::min(c[a] + 1, D[a] - 1);
          const int span = hi[a] - lo[a];
          g[a] = span == 0 ? 0.0
                           : (sdf.distance[sdf.index(hi[0], hi[1], hi[2])] -
                              sdf.distance[sdf.index(lo[0], lo[1], lo[2])]) /
                                 (span * sdf.spacing);
        }
        const double len = g.norm();
        sdf.normal[sdf.index(i, j, k)] = len > 0.0 ? Vec3(g / len) : Vec3::Zero();
      }
  });
}

/// Voxelises a closed mesh. Sign comes from a three-ray parity vote per node;
/// more than 0.1% of nodes with disagreeing rays means the mesh leaks.
inline VoxelSDF sdf_from_mesh(const TriangleMesh& mesh, double spacing, int padding = 3) {
  validate(mesh);
  if (!(spacing > 0.0)) throw Error(Errc::invalid_config, "SDF spacing must be positive");
  if (padding < 0) throw Error(Errc::invalid_config, "SDF padding must be >= 0");
  const Aabb box = bounds(mesh);
  VoxelSDF sdf;
  sdf.spacing = spacing;
  sdf.origin = box.lo - Vec3::Constant(padding * spacing);
  for (int a = 0; a < 3; ++a)
    sdf.dims[a] = static_cast<int>(std::ceil((box.hi[a] - box.lo[a]) / spacing)) + 2 * padding + 1;
  const std::size_t n = static_cast<std::size_t>(sdf.dims[0]) * sdf.dims[1] * sdf.dims[2];
  sdf.distance.assign(n, 0.0);
  std::vector<unsigned char> inconsistent(n, 0);
  parallel_for(n, [&](std::size_t idx) {
    const int i = static_cast<int>(idx % sdf.dims[0]);
    const int j = static_cast<int>((idx / sdf.dims[0]) % sdf.dims[1]);
    const int k = static_cast<int>(idx / (static_cast<std::size_t>(sdf.dims[0]) * sdf.dims[1]));
    const Vec3 p = sdf.node(i, j, k);
    const double d = unsigned_distance(mesh, p);
    bool inside = false;
    if (box.contains(p)) {
      const auto vote = parity_inside(mesh, p);
      inside = vote.inside;
      inconsistent[idx] = !vote.consistent;
    }
    sdf.distance[idx] = inside ? -d : d;
  });
  std::size_t bad = 0;
  for (auto b : inconsistent) bad += b;
  if (bad * 1000 > n)
    throw Error(Errc::non_watertight,
                std::to_string(bad) + " of " + std::to_string(n) + " voxels have inconsistent ray parity");
  compute_normals(sdf);
  return sdf;
}

/// Analytic sphere SDF on a grid; handy for colliders and as a test oracle.
inline VoxelSDF sdf_from_sphere(const Vec3& center, double radius, double spacing, int padding = 3) {
  VoxelSDF sdf;
  sdf.spacing = spacing;
  const int half = static_cast<int>(std::ceil(radius / spacing)) + padding;
  sdf.origin = center - Vec3::Constant(half * spacing);
  sdf.dims = {2 * half + 1, 2 * half + 1, 2 * half + 1};
  sdf.distance.resize(static_cast<std::size_t>(sdf.dims[0]) * sdf.dims[1] * sdf.dims[2]);
  for (int k = 0; k < sdf.dims[2]; ++k)
    for (int j = 0; j < sdf.dims[1]; ++j)
      for (int i = 0; i < sdf.dims[0]; ++i)
        sdf.distance[sdf.index(i, j, k)] = (sdf.node(i, j, k) - center).norm() - radius;
  compute_normals(sdf);
  return sdf;
}

}  // namespace physkit::mpm
