#pragma once

#include <cmath>
#include <functional>

#include "physkit/error.hpp"
#include "physkit/mpm/mesh.hpp"
#include "physkit/mpm/particles.hpp"
#include "physkit/random.hpp"

namespace physkit::mpm {

struct SeedOptions {
  double dx = 0.0083;
  int per_cell = 8;
  double density = 1000.0;  // kg/m^3
  std::uint32_t material_id = 0;
  std::uint32_t object_id = 1;
  Vec3 velocity = Vec3::Zero();
};

/// Jittered sampling of the cells of `box` whose samples satisfy `inside`.
/// When per_cell is a perfect cube the cell is stratified into sub-cells.
inline ParticleSet seed_region(const Aabb& box, const std::function<bool(const Vec3&)>& inside,
                               const SeedOptions& opt, Rng& rng) {
  if (!(opt.dx > 0.0)) throw Error(Errc::invalid_config, "seeding dx must be positive");
  if (opt.per_cell < 1) throw Error(Errc::invalid_config, "per_cell must be >= 1");
  if (!(opt.density > 0.0)) throw Error(Errc::invalid_material, "density must be positive");
  const int strata = static_cast<int>(std::lround(std::cbrt(static_cast<double>(opt.per_cell))));
  const bool stratified = strata * strata * strata == opt.per_cell;
  const double cell_volume = opt.dx * opt.dx * opt.dx;
  const double volume = cell_volume / opt.per_cell;
  const double mass = opt.density * volume;
  std::array<int, 3> cells{};
  for (int a = 0; a < 3; ++a) cells[a] = std::max(1, static_cast<int>(std::ceil((box.hi[a] - box.lo[a]) / opt.dx)));
  ParticleSet out;
  for (int k = 0; k < cells[2]; ++k)
    for (int j = 0; j < cells[1]; ++j)
      for (int i = 0; i < cells[0]; ++i) {
        const Vec3 corner = box.lo + opt.dx * Vec3(i, j, k);
        for (int s = 0; s < opt.per_cell; ++s) {
          Vec3 u(rng.uniform(), rng.uniform(), rng.uniform());
          if (stratified) {
            const Vec3 sub(s % strata, (s / strata) % strata, s / (strata * strata));
            u = (sub + u) / strata;
          }
          const Vec3 p = corner + opt.dx * u;
          if (box.contains(p) && inside(p)) out.add(p, opt.velocity, mass, volume, opt.material_id, opt.object_id);
        }
      }
  return out;
}

inline ParticleSet seed_box(const Vec3& lo, const Vec3& hi, const SeedOptions& opt, Rng& rng) {
  Aabb box{lo, hi};
  return seed_region(box, [](const Vec3&) { return true; }, opt, rng);
}

inline ParticleSet seed_mesh(const TriangleMesh& mesh, const SeedOptions& opt, Rng& rng) {
  validate(mesh);
  return seed_region(bounds(mesh), [&](const Vec3& p) { return mesh_contains(mesh, p); }, opt, rng);
}

}  // namespace physkit::mpm
