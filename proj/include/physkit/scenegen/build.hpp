#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "physkit/mpm/mesh.hpp"
#include "physkit/mpm/sdf.hpp"
#include "physkit/mpm/seeding.hpp"
#include "physkit/mpm/solver.hpp"
#include "physkit/random.hpp"
#include "physkit/scenegen/scene.hpp"

namespace physkit::scenegen {

/// Object geometry in world coordinates. Relative mesh paths resolve against base_dir.
inline mpm::TriangleMesh object_mesh(const ObjectSpec& o, const std::filesystem::path& base_dir = {}) {
  const mpm::Mat3 R = o.orientation.normalized().toRotationMatrix();
  mpm::TriangleMesh mesh;
  switch (o.shape.kind) {
    case ShapeKind::box:
      mesh = mpm::make_box_mesh(-o.shape.half_extents, o.shape.half_extents);
      mpm::transform(mesh, R, o.position);
      break;
    case ShapeKind::sphere:
      mesh = mpm::make_sphere_mesh(o.position, o.shape.radius);
      break;
    case ShapeKind::mesh: {
      std::filesystem::path p = o.shape.mesh_path;
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      mesh = mpm::load_mesh(p);
      mpm::transform(mesh, o.shape.scale * R, o.position);
      break;
    }
  }
  return mesh;
}

/// Solver inputs derived from a scene.
struct SceneBuild {
  mpm::SimConfig config;
  std::vector<constitutive::MaterialModel> materials;
  mpm::ParticleSet particles;
  mpm::SceneForces forces;
  std::vector<std::uint32_t> continuum_objects;  // segmentation ids seeded as particles
};

/// Continuum objects become particles (density in g/cm^3 scaled to kg/m^3);
/// the other classes become static colliders.
inline SceneBuild build_simulation(const SceneSpec& spec, const std::filesystem::path& base_dir = {}) {
  validate(spec);
  SceneBuild b;
  b.config = spec.sim.config;
  b.config.seed = spec.seed;
  std::map<std::string, std::uint32_t> model_index;
  for (const auto& m : spec.materials)
    if (m.model) {
      model_index[m.name] = static_cast<std::uint32_t>(b.materials.size());
      b.materials.push_back(*m.model);
    }
  b.forces.primitives = spec.sim.colliders;
  b.forces.winds = spec.forces.winds;

  Rng root(spec.seed);
  const double dx = b.config.dx;
  for (std::size_t i = 0; i < spec.objects.size(); ++i) {
    const auto& o = spec.objects[i];
    const auto& mat = *spec.find_material(o.material);
    const auto id = SceneSpec::segmentation_id(i);
    Rng rng = root.fork(i);
    if (is_continuum(o.object_class)) {
      mpm::SeedOptions opt;
      opt.dx = dx;
      opt.per_cell = spec.sim.particles_per_cell;
      opt.density = mat.surface.density * 1000.0;
      opt.material_id = model_index.at(o.material);
      opt.object_id = id;
      opt.velocity = o.velocity;
      mpm::ParticleSet seeded;
      const bool axis_aligned = o.orientation.normalized().angularDistance(Quat::Identity()) < 1e-12;
      if (o.shape.kind == ShapeKind::box && axis_aligned) {
        seeded = mpm::seed_box(o.position - o.shape.half_extents, o.position + o.shape.half_extents, opt, rng);
      } else if (o.shape.kind == ShapeKind::sphere) {
        const Vec3 c = o.position;
        const double r = o.shape.radius;
        mpm::Aabb box{c - Vec3::Constant(r), c + Vec3::Constant(r)};
        seeded = mpm::seed_region(box, [&](const Vec3& p) { return (p - c).norm() <= r; }, opt, rng);
      } else {
        seeded = mpm::seed_mesh(object_mesh(o, base_dir), opt, rng);
      }
      if (seeded.empty()) throw Error(Errc::invalid_scene, "object '" + o.name + "' produced no particles");
      b.particles.append(seeded);
      b.continuum_objects.push_back(id);
    } else if (o.shape.kind == ShapeKind::sphere) {
      b.forces.primitives.push_back(
          mpm::SphereCollider{o.position, o.shape.radius, o.contact, mat.surface.dynamic_friction});
    } else {
      auto sdf = mpm::sdf_from_mesh(object_mesh(o, base_dir), dx);
      sdf.contact_mode = o.contact;
      sdf.friction = mat.surface.dynamic_friction;
      b.forces.sdfs.push_back(std::move(sdf));
    }
  }
  return b;
}

}  // namespace physkit::scenegen
