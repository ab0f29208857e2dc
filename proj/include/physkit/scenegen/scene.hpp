#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "physkit/camgen/camgen.hpp"
#include "physkit/constitutive/material.hpp"
#include "physkit/error.hpp"
#include "physkit/forces/forces.hpp"
#include "physkit/mpm/solver.hpp"
#include "physkit/scenegen/registry.hpp"

namespace physkit::scenegen {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;
using nlohmann::json;
using constitutive::MaterialModel;

enum class ObjectClass { solid, interactable, destructible, deformable, granular, liquid };

inline std::string to_string(ObjectClass c) {
  switch (c) {
    case ObjectClass::solid: return "solid";
    case ObjectClass::interactable: return "interactable";
    case ObjectClass::destructible: return "destructible";
    case ObjectClass::deformable: return "deformable";
    case ObjectClass::granular: return "granular";
    case ObjectClass::liquid: return "liquid";
  }
  return "unknown";
}

inline ObjectClass parse_object_class(const std::string& s) {
  for (auto c : {ObjectClass::solid, ObjectClass::interactable, ObjectClass::destructible, ObjectClass::deformable,
                 ObjectClass::granular, ObjectClass::liquid})
    if (to_string(c) == s) return c;
  throw Error(Errc::invalid_scene, "unknown object class '" + s + "'");
}

/// Classes simulated as MPM continua; the rest act as static colliders.
inline bool is_continuum(ObjectClass c) {
  return c == ObjectClass::deformable || c == ObjectClass::granular || c == ObjectClass::liquid;
}

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Published parameter ranges used for validation and variation.
namespace ranges {
inline constexpr Range friction{0.0, 0.9};
inline constexpr Range restitution{0.1, 0.8};
inline constexpr Range density{0.1, 21.3};  // g/cm^3
inline constexpr Range sph_viscosity{0.0, 5.0};
inline constexpr Range sph_surface_tension{0.5, 3.0};
inline constexpr Range fluid_viscosity{25.0, 200.0};
inline constexpr Range plastic_viscosity{3.0, 10.0};
inline constexpr Range yield_stress{0.1, 10.0};
inline constexpr Range friction_angle{15.0, 60.0};  // degrees
}  // namespace ranges

struct SurfaceProperties {
  double dynamic_friction = 0.5;
  double static_friction = 0.6;
  double density = 1.0;  // g/cm^3
  double restitution = 0.5;

  bool operator==(const SurfaceProperties&) const = default;
};

struct SphProperties {
  double viscosity = 1.0;
  double surface_tension = 1.0;
};

struct MaterialSpec {
  std::string name;
  std::optional<MaterialModel> model;  // required for continuum objects
  SurfaceProperties surface;
  std::optional<SphProperties> sph;
  bool allow_out_of_range = false;
};

enum class ShapeKind { box, sphere, mesh };

struct ShapeSpec {
  ShapeKind kind = ShapeKind::box;
  Vec3 half_extents = Vec3::Constant(0.05);
  double radius = 0.05;
  std::string mesh_path;
  double scale = 1.0;
};

struct ObjectSpec {
  std::string name;
  std::string asset_id;
  ObjectClass object_class = ObjectClass::solid;
  std::string material;
  ShapeSpec shape;
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();
  Vec3 velocity = Vec3::Zero();
  mpm::ContactMode contact = mpm::ContactMode::sticky;
};

struct ForceFieldSpec {
  std::vector<forces::WindField> winds;
  std::vector<forces::Magnet> magnets;
};

struct SimSpec {
  mpm::SimConfig config;
  int frames = 30;
  int particles_per_cell = 8;
  std::vector<mpm::AnalyticCollider> colliders;
};

struct CameraSpec {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
  int static_views = 1;
  std::vector<camgen::TrajectoryConfig> trajectories;
};

struct AnnotationSpec {
  int width = 64;
  int height = 64;
  double fov_deg = 50.0;
  int splat_radius = 1;  // pixels
};

struct SceneSpec {
  std::string id;
  Activity activity;
  std::string background;
  std::vector<ObjectSpec> objects;
  std::vector<MaterialSpec> materials;
  std::map<int, std::vector<std::string>> phenomenon_objects;
  ForceFieldSpec forces;
  SimSpec sim;
  CameraSpec cameras;
  AnnotationSpec annotation;
  std::uint64_t seed = 0;

  const MaterialSpec* find_material(const std::string& name) const {
    for (const auto& m : materials)
      if (m.name == name) return &m;
    return nullptr;
  }

  /// Segmentation id of object i is i + 1; the background is 0.
  static std::uint32_t segmentation_id(std::size_t object_index) { return static_cast<std::uint32_t>(object_index + 1); }

  std::set<std::string> asset_ids() const {
    std::set<std::string> ids;
    for (const auto& o : objects) ids.insert(o.asset_id);
    return ids;
  }
};

namespace detail {

inline void check_range(double x, Range r, const std::string& what) {
  if (!std::isfinite(x) || !r.contains(x))
    throw Error(Errc::value_out_of_range, what + " = " + std::to_string(x) + " outside [" + std::to_string(r.lo) + ", " +
                                              std::to_string(r.hi) + "]");
}

inline void check_model_ranges(const MaterialModel& m, const std::string& name) {
  std::visit(
      [&](const auto& mat) {
        using T = std::decay_t<decltype(mat)>;
        if constexpr (std::is_same_v<T, constitutive::Plasticine>) {
          check_range(mat.yield_stress, ranges::yield_stress, name + " yield_stress");
        } else if constexpr (std::is_same_v<T, constitutive::NewtonianFluid>) {
          check_range(mat.viscosity, ranges::fluid_viscosity, name + " viscosity");
        } else if constexpr (std::is_same_v<T, constitutive::NonNewtonianFluid>) {
          check_range(mat.yield_stress, ranges::yield_stress, name + " yield_stress");
          check_range(mat.plastic_viscosity, ranges::plastic_viscosity, name + " plastic_viscosity");
        } else if constexpr (std::is_same_v<T, constitutive::Granular>) {
          check_range(mat.friction_angle, ranges::friction_angle, name + " friction_angle");
        }
      },
      m);
}

}  // namespace detail

inline void validate(const MaterialSpec& m) {
  if (m.name.empty()) throw Error(Errc::invalid_scene, "material without a name");
  if (m.model) constitutive::validate(*m.model);
  const auto& s = m.surface;
  if (!(s.density > 0.0)) throw Error(Errc::invalid_material, m.name + " density must be positive");
  if (m.allow_out_of_range) return;
  detail::check_range(s.dynamic_friction, ranges::friction, m.name + " dynamic_friction");
  detail::check_range(s.static_friction, ranges::friction, m.name + " static_friction");
  detail::check_range(s.density, ranges::density, m.name + " density");
  detail::check_range(s.restitution, ranges::restitution, m.name + " restitution");
  if (m.sph) {
    detail::check_range(m.sph->viscosity, ranges::sph_viscosity, m.name + " sph viscosity");
    detail::check_range(m.sph->surface_tension, ranges::sph_surface_tension, m.name + " sph surface_tension");
  }
  if (m.model) detail::check_model_ranges(*m.model, m.name);
}

/// Structural checks; pass a registry to also check phenomenon compatibility.
inline void validate(const SceneSpec& spec, const PhenomenonRegistry* reg = nullptr) {
  if (spec.id.empty()) throw Error(Errc::invalid_scene, "scene id is empty");
  if (spec.objects.empty()) throw Error(Errc::invalid_scene, spec.id + ": scene has no objects");
  std::set<std::string> names;
  for (const auto& m : spec.materials) {
    if (!names.insert(m.name).second) throw Error(Errc::invalid_scene, "duplicate material '" + m.name + "'");
    validate(m);
  }
  names.clear();
  for (const auto& o : spec.objects) {
    if (o.name.empty() || o.asset_id.empty()) throw Error(Errc::invalid_scene, "object needs a name and an asset_id");
    if (!names.insert(o.name).second) throw Error(Errc::invalid_scene, "duplicate object '" + o.name + "'");
    const auto* mat = spec.find_material(o.material);
    if (!mat) throw Error(Errc::invalid_scene, "object '" + o.name + "' references unknown material '" + o.material + "'");
    if (is_continuum(o.object_class) && !mat->model)
      throw Error(Errc::invalid_scene, "object '" + o.name + "' is simulated but material '" + o.material + "' has no model");
    if (!o.position.allFinite() || !o.velocity.allFinite())
      throw Error(Errc::invalid_scene, "object '" + o.name + "' has a non-finite pose");
    if (std::abs(o.orientation.norm() - 1.0) > 1e-6)
      throw Error(Errc::invalid_scene, "object '" + o.name + "' orientation must be a unit quaternion");
  }
  if (reg) validate(spec.activity, *reg);
  for (int p : spec.activity.phenomena) {
    auto it = spec.phenomenon_objects.find(p);
    if (it == spec.phenomenon_objects.end() || it->second.empty())
      throw Error(Errc::invalid_scene, "no object tagged for phenomenon " + std::to_string(p));
    for (const auto& n : it->second)
      if (!names.count(n))
        throw Error(Errc::invalid_scene, "phenomenon " + std::to_string(p) + " tags unknown object '" + n + "'");
  }
  mpm::validate(spec.sim.config);
  if (spec.sim.frames < 0) throw Error(Errc::invalid_config, "frames must be >= 0");
  if (spec.sim.particles_per_cell < 1) throw Error(Errc::invalid_config, "particles_per_cell must be >= 1");
  for (const auto& w : spec.forces.winds) forces::validate(w);
  for (const auto& m : spec.forces.magnets) forces::validate(m);
  if (!(spec.cameras.radius > 0.0)) throw Error(Errc::invalid_config, "camera radius must be positive");
  if (spec.cameras.static_views < 0) throw Error(Errc::invalid_config, "static_views must be >= 0");
  const auto& a = spec.annotation;
  if (a.width < 1 || a.height < 1 || !(a.fov_deg > 0.0 && a.fov_deg < 180.0) || a.splat_radius < 0)
    throw Error(Errc::invalid_config, "annotation raster settings are invalid");
}

// JSON conversion. Missing keys fall back to the defaults above.

namespace detail {

inline Vec3 vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw Error(Errc::invalid_scene, "expected a 3-vector, got " + j.dump());
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

inline Vec3 vec3_or(const json& j, const char* key, const Vec3& fallback) {
  return j.contains(key) ? vec3(j.at(key)) : fallback;
}

inline MaterialModel model_from_json(const json& j) {
  namespace c = constitutive;
  const auto type = j.at("type").get<std::string>();
  auto lame = [&] { return c::lame_from_modulus(j.at("youngs_modulus").get<double>(), j.at("poisson_ratio").get<double>()); };
  if (type == "elastic") return c::ElasticSolid{lame()};
  if (type == "plasticine") return c::Plasticine{lame(), j.at("yield_stress").get<double>()};
  if (type == "newtonian") return c::NewtonianFluid{j.at("viscosity").get<double>(), j.at("bulk_modulus").get<double>()};
  if (type == "non_newtonian") {
    c::NonNewtonianFluid m{j.at("shear_modulus").get<double>(), j.at("bulk_modulus").get<double>(),
                           j.at("yield_stress").get<double>(), j.at("plastic_viscosity").get<double>()};
    const auto mode = j.value("yield_mode", std::string("stress_space"));
    if (mode == "strain_space") m.yield_mode = c::NonNewtonianYield::strain_space;
    else if (mode != "stress_space") throw Error(Errc::invalid_material, "unknown yield_mode '" + mode + "'");
    return m;
  }
  if (type == "granular") return c::make_granular(lame(), j.at("friction_angle").get<double>());
  throw Error(Errc::invalid_material, "unknown material model '" + type + "'");
}

inline json model_to_json(const MaterialModel& m) {
  namespace c = constitutive;
  json j;
  j["type"] = c::model_name(m);
  std::visit(
      [&](const auto& mat) {
        using T = std::decay_t<decltype(mat)>;
        if constexpr (std::is_same_v<T, c::ElasticSolid> || std::is_same_v<T, c::Plasticine> ||
                      std::is_same_v<T, c::Granular>) {
          j["youngs_modulus"] = mat.lame.youngs_modulus;
          j["poisson_ratio"] = mat.lame.poisson_ratio;
        }
        if constexpr (std::is_same_v<T, c::Plasticine>) j["yield_stress"] = mat.yield_stress;
        if constexpr (std::is_same_v<T, c::Granular>) j["friction_angle"] = mat.friction_angle;
        if constexpr (std::is_same_v<T, c::NewtonianFluid>) {
          j["viscosity"] = mat.viscosity;
          j["bulk_modulus"] = mat.bulk_modulus;
        }
        if constexpr (std::is_same_v<T, c::NonNewtonianFluid>) {
          j["shear_modulus"] = mat.shear_modulus;
          j["bulk_modulus"] = mat.bulk_modulus;
          j["yield_stress"] = mat.yield_stress;
          j["plastic_viscosity"] = mat.plastic_viscosity;
          j["yield_mode"] = mat.yield_mode == c::NonNewtonianYield::stress_space ? "stress_space" : "strain_space";
        }
      },
      m);
  return j;
}

inline mpm::AnalyticCollider collider_from_json(const json& j) {
  const auto type = j.at("type").get<std::string>();
  const auto mode = mpm::parse_contact_mode(j.value("mode", std::string("sticky")));
  const double friction = j.value("friction", 0.0);
  if (type == "plane") {
    const Vec3 n = vec3_or(j, "normal", Vec3::UnitZ());
    if (!(n.norm() > 0.0)) throw Error(Errc::invalid_config, "plane normal must be nonzero");
    return mpm::PlaneCollider{vec3_or(j, "point", Vec3::Zero()), n.normalized(), mode, friction};
  }
  if (type == "sphere") return mpm::SphereCollider{vec3(j.at("center")), j.at("radius").get<double>(), mode, friction};
  throw Error(Errc::invalid_config, "unknown collider type '" + type + "'");
}

inline json collider_to_json(const mpm::AnalyticCollider& c) {
  return std::visit(
      [](const auto& col) -> json {
        using T = std::decay_t<decltype(col)>;
        json j;
        if constexpr (std::is_same_v<T, mpm::PlaneCollider>) {
          j = {{"type", "plane"}, {"point", to_json(col.point)}, {"normal", to_json(col.normal)}};
        } else {
          j = {{"type", "sphere"}, {"center", to_json(col.center)}, {"radius", col.radius}};
        }
        j["mode"] = mpm::to_string(col.mode);
        j["friction"] = col.friction;
        return j;
      },
      c);
}

inline camgen::TrajectoryConfig trajectory_from_json(const json& j, const CameraSpec& cams) {
  camgen::TrajectoryConfig t;
  t.strategy = camgen::parse_strategy(j.value("strategy", std::string("linear_drift")));
  t.hemisphere = camgen::parse_hemisphere(j.value("hemisphere", std::string("both")));
  t.base_radius = j.value("radius", cams.radius);
  t.center = vec3_or(j, "center", cams.center);
  t.seed = j.value("seed", std::uint64_t{0});
  t.n_frames = j.value("n_frames", t.n_frames);
  t.drift_sigma = j.value("drift_sigma", t.drift_sigma);
  t.loop_intensity = j.value("loop_intensity", t.loop_intensity);
  t.loop_points = j.value("loop_points", t.loop_points);
  t.radius_amplitude = j.value("radius_amplitude", t.radius_amplitude);
  t.loop_radius_amplitude = j.value("loop_radius_amplitude", t.loop_radius_amplitude);
  return t;
}

inline json trajectory_to_json(const camgen::TrajectoryConfig& t) {
  return {{"strategy", camgen::to_string(t.strategy)}, {"hemisphere", camgen::to_string(t.hemisphere)},
          {"radius", t.base_radius},                   {"center", to_json(t.center)},
          {"seed", t.seed},                            {"n_frames", t.n_frames},
          {"drift_sigma", t.drift_sigma},              {"loop_intensity", t.loop_intensity},
          {"loop_points", t.loop_points},              {"radius_amplitude", t.radius_amplitude},
          {"loop_radius_amplitude", t.loop_radius_amplitude}};
}

inline ShapeSpec shape_from_json(const json& j) {
  ShapeSpec s;
  const auto type = j.value("type", std::string("box"));
  if (type == "box") {
    s.kind = ShapeKind::box;
    s.half_extents = vec3_or(j, "half_extents", s.half_extents);
  } else if (type == "sphere") {
    s.kind = ShapeKind::sphere;
    s.radius = j.value("radius", s.radius);
  } else if (type == "mesh") {
    s.kind = ShapeKind::mesh;
    s.mesh_path = j.at("path").get<std::string>();
    s.scale = j.value("scale", 1.0);
  } else {
    throw Error(Errc::invalid_scene, "unknown shape type '" + type + "'");
  }
  return s;
}

inline json shape_to_json(const ShapeSpec& s) {
  switch (s.kind) {
    case ShapeKind::box: return {{"type", "box"}, {"half_extents", to_json(s.half_extents)}};
    case ShapeKind::sphere: return {{"type", "sphere"}, {"radius", s.radius}};
    case ShapeKind::mesh: return {{"type", "mesh"}, {"path", s.mesh_path}, {"scale", s.scale}};
  }
  return {};
}

}  // namespace detail

inline SceneSpec scene_from_json(const json& j) {
  using detail::vec3;
  using detail::vec3_or;
  SceneSpec s;
  try {
    s.id = j.at("id").get<std::string>();
    s.background = j.value("background", std::string("none"));
    s.seed = j.value("seed", std::uint64_t{0});
    s.activity.phenomena = j.at("activity").get<std::vector<int>>();
    std::sort(s.activity.phenomena.begin(), s.activity.phenomena.end());
    if (s.activity.phenomena.empty() || s.activity.phenomena.size() > 3)
      throw Error(Errc::invalid_scene, "activity must list 1 to 3 phenomena");
    s.activity.arity = static_cast<Arity>(s.activity.phenomena.size());

    for (const auto& mj : j.at("materials")) {
      MaterialSpec m;
      m.name = mj.at("name").get<std::string>();
      if (mj.contains("model")) m.model = detail::model_from_json(mj.at("model"));
      if (mj.contains("surface")) {
        const auto& sj = mj.at("surface");
        m.surface.dynamic_friction = sj.value("dynamic_friction", m.surface.dynamic_friction);
        m.surface.static_friction = sj.value("static_friction", m.surface.static_friction);
        m.surface.density = sj.value("density", m.surface.density);
        m.surface.restitution = sj.value("restitution", m.surface.restitution);
      }
      if (mj.contains("sph"))
        m.sph = SphProperties{mj.at("sph").value("viscosity", 1.0), mj.at("sph").value("surface_tension", 1.0)};
      m.allow_out_of_range = mj.value("allow_out_of_range", false);
      s.materials.push_back(std::move(m));
    }

    for (const auto& oj : j.at("objects")) {
      ObjectSpec o;
      o.name = oj.at("name").get<std::string>();
      o.asset_id = oj.value("asset_id", o.name);
      o.object_class = parse_object_class(oj.value("class", std::string("solid")));
      o.material = oj.at("material").get<std::string>();
      if (oj.contains("shape")) o.shape = detail::shape_from_json(oj.at("shape"));
      o.position = vec3_or(oj, "position", o.position);
      if (oj.contains("orientation")) {
        const auto q = oj.at("orientation").get<std::vector<double>>();
        if (q.size() != 4) throw Error(Errc::invalid_scene, "orientation must be (w, x, y, z)");
        o.orientation = Quat(q[0], q[1], q[2], q[3]);
      }
      o.velocity = vec3_or(oj, "velocity", o.velocity);
      o.contact = mpm::parse_contact_mode(oj.value("contact", std::string("sticky")));
      s.objects.push_back(std::move(o));
    }

    if (j.contains("phenomenon_objects"))
      for (const auto& [key, names] : j.at("phenomenon_objects").items())
        s.phenomenon_objects[std::stoi(key)] = names.get<std::vector<std::string>>();

    if (j.contains("forces")) {
      const auto& fj = j.at("forces");
      for (const auto& wj : fj.value("winds", json::array())) {
        forces::WindField w;
        w.origin = vec3(wj.at("origin"));
        w.direction = vec3(wj.at("direction")).normalized();
        w.length = wj.at("length").get<double>();
        w.lateral = vec3_or(wj, "lateral", w.lateral);
        w.half_width = wj.value("half_width", w.half_width);
        w.half_height = wj.value("half_height", w.half_height);
        w.peak_force = wj.at("peak_force").get<double>();
        s.forces.winds.push_back(w);
      }
      for (const auto& mj : fj.value("magnets", json::array())) {
        forces::Magnet m;
        m.pole_n = vec3(mj.at("pole_n"));
        m.pole_s = vec3(mj.at("pole_s"));
        m.strength = mj.value("strength", m.strength);
        m.center_of_mass = vec3_or(mj, "center_of_mass", 0.5 * (m.pole_n + m.pole_s));
        s.forces.magnets.push_back(m);
      }
    }

    if (j.contains("sim")) {
      const auto& sj = j.at("sim");
      auto& c = s.sim.config;
      c.dt = sj.value("dt", c.dt);
      c.dx = sj.value("dx", c.dx);
      c.gravity = vec3_or(sj, "gravity", c.gravity);
      c.substeps_per_frame = sj.value("substeps_per_frame", c.substeps_per_frame);
      c.frame_rate = sj.value("frame_rate", c.frame_rate);
      c.domain_lo = vec3_or(sj, "domain_lo", c.domain_lo);
      c.domain_hi = vec3_or(sj, "domain_hi", c.domain_hi);
      if (sj.contains("boundary")) {
        const auto& bj = sj.at("boundary");
        c.boundary.enabled = bj.value("enabled", c.boundary.enabled);
        c.boundary.mode = mpm::parse_contact_mode(bj.value("mode", mpm::to_string(c.boundary.mode)));
        c.boundary.friction = bj.value("friction", c.boundary.friction);
        c.boundary.margin = bj.value("margin", c.boundary.margin);
      }
      s.sim.frames = sj.value("frames", s.sim.frames);
      s.sim.particles_per_cell = sj.value("particles_per_cell", s.sim.particles_per_cell);
      for (const auto& cj : sj.value("colliders", json::array())) s.sim.colliders.push_back(detail::collider_from_json(cj));
    }
    s.sim.config.seed = s.seed;

    if (j.contains("cameras")) {
      const auto& cj = j.at("cameras");
      s.cameras.center = vec3_or(cj, "center", s.cameras.center);
      s.cameras.radius = cj.value("radius", s.cameras.radius);
      s.cameras.static_views = cj.value("static_views", s.cameras.static_views);
      for (const auto& tj : cj.value("trajectories", json::array()))
        s.cameras.trajectories.push_back(detail::trajectory_from_json(tj, s.cameras));
    }

    if (j.contains("annotation")) {
      const auto& aj = j.at("annotation");
      s.annotation.width = aj.value("width", s.annotation.width);
      s.annotation.height = aj.value("height", s.annotation.height);
      s.annotation.fov_deg = aj.value("fov_deg", s.annotation.fov_deg);
      s.annotation.splat_radius = aj.value("splat_radius", s.annotation.splat_radius);
    }
  } catch (const json::exception& e) {
    throw Error(Errc::invalid_scene, std::string("scene JSON: ") + e.what());
  }
  return s;
}

inline json scene_to_json(const SceneSpec& s) {
  using detail::to_json;
  json j;
  j["id"] = s.id;
  j["activity"] = s.activity.phenomena;
  j["background"] = s.background;
  j["seed"] = s.seed;
  json mats = json::array();
  for (const auto& m : s.materials) {
    json mj{{"name", m.name},
            {"surface",
             {{"dynamic_friction", m.surface.dynamic_friction},
              {"static_friction", m.surface.static_friction},
              {"density", m.surface.density},
              {"restitution", m.surface.restitution}}}};
    if (m.model) mj["model"] = detail::model_to_json(*m.model);
    if (m.sph) mj["sph"] = {{"viscosity", m.sph->viscosity}, {"surface_tension", m.sph->surface_tension}};
    if (m.allow_out_of_range) mj["allow_out_of_range"] = true;
    mats.push_back(std::move(mj));
  }
  j["materials"] = std::move(mats);
  json objs = json::array();
  for (const auto& o : s.objects) {
    const auto& q = o.orientation;
    objs.push_back({{"name", o.name},
                    {"asset_id", o.asset_id},
                    {"class", to_string(o.object_class)},
                    {"material", o.material},
                    {"shape", detail::shape_to_json(o.shape)},
                    {"position", to_json(o.position)},
                    {"orientation", {q.w(), q.x(), q.y(), q.z()}},
                    {"velocity", to_json(o.velocity)},
                    {"contact", mpm::to_string(o.contact)}});
  }
  j["objects"] = std::move(objs);
  json tags = json::object();
  for (const auto& [p, names] : s.phenomenon_objects) tags[std::to_string(p)] = names;
  j["phenomenon_objects"] = std::move(tags);
  json winds = json::array(), magnets = json::array();
  for (const auto& w : s.forces.winds)
    winds.push_back({{"origin", to_json(w.origin)},
                     {"direction", to_json(w.direction)},
                     {"length", w.length},
                     {"lateral", to_json(w.lateral)},
                     {"half_width", w.half_width},
                     {"half_height", w.half_height},
                     {"peak_force", w.peak_force}});
  for (const auto& m : s.forces.magnets)
    magnets.push_back({{"pole_n", to_json(m.pole_n)},
                       {"pole_s", to_json(m.pole_s)},
                       {"strength", m.strength},
                       {"center_of_mass", to_json(m.center_of_mass)}});
  j["forces"] = {{"winds", std::move(winds)}, {"magnets", std::move(magnets)}};
  const auto& c = s.sim.config;
  json colliders = json::array();
  for (const auto& col : s.sim.colliders) colliders.push_back(detail::collider_to_json(col));
  j["sim"] = {{"dt", c.dt},
              {"dx", c.dx},
              {"gravity", to_json(c.gravity)},
              {"substeps_per_frame", c.substeps_per_frame},
              {"frame_rate", c.frame_rate},
              {"domain_lo", to_json(c.domain_lo)},
              {"domain_hi", to_json(c.domain_hi)},
              {"boundary",
               {{"enabled", c.boundary.enabled},
                {"mode", mpm::to_string(c.boundary.mode)},
                {"friction", c.boundary.friction},
                {"margin", c.boundary.margin}}},
              {"frames", s.sim.frames},
              {"particles_per_cell", s.sim.particles_per_cell},
              {"colliders", std::move(colliders)}};
  json trajs = json::array();
  for (const auto& t : s.cameras.trajectories) trajs.push_back(detail::trajectory_to_json(t));
  j["cameras"] = {{"center", to_json(s.cameras.center)},
                  {"radius", s.cameras.radius},
                  {"static_views", s.cameras.static_views},
                  {"trajectories", std::move(trajs)}};
  j["annotation"] = {{"width", s.annotation.width},
                     {"height", s.annotation.height},
                     {"fov_deg", s.annotation.fov_deg},
                     {"splat_radius", s.annotation.splat_radius}};
  return j;
}

inline SceneSpec load_scene(const std::filesystem::path& path) { return scene_from_json(read_json_file(path)); }

inline void save_scene(const SceneSpec& spec, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_failure, "cannot write " + path.string());
  out << scene_to_json(spec).dump(2) << '\n';
  if (!out) throw Error(Errc::io_failure, "write failed for " + path.string());
}

/// Camera poses per camera per frame: static views first, then trajectories.
inline std::vector<std::vector<camgen::CameraPose>> camera_poses(const SceneSpec& spec, int n_frames) {
  std::vector<std::vector<camgen::CameraPose>> cams;
  if (n_frames < 1) return cams;
  const auto frames = static_cast<std::size_t>(n_frames);
  if (spec.cameras.static_views > 0) {
    const auto ring = camgen::sample_static_ring(spec.cameras.static_views, spec.cameras.radius, spec.cameras.center,
                                                 spec.seed);
    for (const auto& pose : ring) cams.emplace_back(frames, pose);
  }
  for (auto cfg : spec.cameras.trajectories) {
    cfg.n_frames = std::max(2, n_frames);
    auto poses = camgen::generate_trajectory(cfg);
    poses.resize(frames);
    cams.push_back(std::move(poses));
  }
  return cams;
}

}  // namespace physkit::scenegen
