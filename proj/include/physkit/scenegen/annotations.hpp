#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "physkit/binary_io.hpp"
#include "physkit/camgen/camgen.hpp"
#include "physkit/mpm/particles.hpp"
#include "physkit/parallel.hpp"
#include "physkit/scenegen/build.hpp"
#include "physkit/scenegen/scene.hpp"

namespace physkit::scenegen {

struct RigidPose {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();
};

/// State of the scene at one frame. Rigid objects missing from `rigid` keep their scene pose.
struct FrameSnapshot {
  mpm::ParticleSet particles;
  std::map<std::uint32_t, RigidPose> rigid;
};

struct DepthRaster {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<float> meters;  // 0 where nothing was splatted
};

struct SegmentationRaster {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<std::uint16_t> ids;  // 0 is background
};

inline constexpr std::string_view piod_magic = "PIOD";
inline constexpr std::string_view pios16_magic = "PIOS16";

inline void save_piod(const DepthRaster& r, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_failure, "cannot write " + path.string());
  binio::write_magic(out, piod_magic);
  binio::write<std::uint32_t>(out, r.height);
  binio::write<std::uint32_t>(out, r.width);
  for (float d : r.meters) binio::write<float>(out, d);
  if (!out) throw Error(Errc::io_failure, "write failed for " + path.string());
}

inline DepthRaster load_piod(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_failure, "cannot open " + path.string());
  binio::expect_magic(in, piod_magic);
  DepthRaster r;
  r.height = binio::read<std::uint32_t>(in, "PIOD height");
  r.width = binio::read<std::uint32_t>(in, "PIOD width");
  r.meters.resize(std::size_t{r.height} * r.width);
  for (auto& d : r.meters) d = binio::read<float>(in, "PIOD payload");
  return r;
}

inline void save_pios16(const SegmentationRaster& r, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_failure, "cannot write " + path.string());
  binio::write_magic(out, pios16_magic);
  binio::write<std::uint32_t>(out, r.height);
  binio::write<std::uint32_t>(out, r.width);
  for (auto id : r.ids) binio::write<std::uint16_t>(out, id);
  if (!out) throw Error(Errc::io_failure, "write failed for " + path.string());
}

inline SegmentationRaster load_pios16(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_failure, "cannot open " + path.string());
  binio::expect_magic(in, pios16_magic);
  SegmentationRaster r;
  r.height = binio::read<std::uint32_t>(in, "PIOS16 height");
  r.width = binio::read<std::uint32_t>(in, "PIOS16 width");
  r.ids.resize(std::size_t{r.height} * r.width);
  for (auto& id : r.ids) id = binio::read<std::uint16_t>(in, "PIOS16 payload");
  return r;
}

/// Points on the mesh surface no farther apart than about `spacing`.
inline std::vector<Vec3> surface_samples(const mpm::TriangleMesh& mesh, double spacing) {
  std::vector<Vec3> pts = mesh.vertices;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Vec3 a = mesh.triangle_vertex(t, 0), b = mesh.triangle_vertex(t, 1), c = mesh.triangle_vertex(t, 2);
    const double edge = std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
    const int m = std::max(1, static_cast<int>(std::ceil(edge / spacing)));
    for (int i = 0; i <= m; ++i)
      for (int j = 0; i + j <= m; ++j) pts.push_back(a + (b - a) * (double(i) / m) + (c - a) * (double(j) / m));
  }
  return pts;
}

/// Pinhole projection of labelled points with square splats and a z-buffer.
class SplatRenderer {
 public:
  SplatRenderer(const camgen::CameraPose& pose, const AnnotationSpec& a) : spec_(a) {
    const auto m = camgen::camera_to_world(pose);
    rotation_ = m.block<3, 3>(0, 0);
    position_ = m.block<3, 1>(0, 3);
    focal_ = 0.5 * a.height / std::tan(0.5 * a.fov_deg * std::numbers::pi / 180.0);
    depth_.height = seg_.height = static_cast<std::uint32_t>(a.height);
    depth_.width = seg_.width = static_cast<std::uint32_t>(a.width);
    depth_.meters.assign(std::size_t(a.height) * a.width, 0.0f);
    seg_.ids.assign(depth_.meters.size(), 0);
    zbuf_.assign(depth_.meters.size(), std::numeric_limits<double>::infinity());
  }

  void splat(const Vec3& world, std::uint16_t id) {
    const Vec3 c = rotation_.transpose() * (world - position_);
    const double depth = -c.z();
    if (!(depth > 1e-6)) return;
    const double u = 0.5 * spec_.width + focal_ * c.x() / depth;
    const double v = 0.5 * spec_.height - focal_ * c.y() / depth;
    const int px = static_cast<int>(std::floor(u)), py = static_cast<int>(std::floor(v));
    const int r = spec_.splat_radius;
    for (int y = py - r; y <= py + r; ++y) {
      if (y < 0 || y >= spec_.height) continue;
      for (int x = px - r; x <= px + r; ++x) {
        if (x < 0 || x >= spec_.width) continue;
        const auto k = static_cast<std::size_t>(y) * spec_.width + x;
        if (depth < zbuf_[k]) {
          zbuf_[k] = depth;
          depth_.meters[k] = static_cast<float>(depth);
          seg_.ids[k] = id;
        }
      }
    }
  }

  const DepthRaster& depth() const { return depth_; }
  const SegmentationRaster& segmentation() const { return seg_; }

 private:
  AnnotationSpec spec_;
  Eigen::Matrix3d rotation_;
  Vec3 position_;
  double focal_ = 1.0;
  DepthRaster depth_;
  SegmentationRaster seg_;
  std::vector<double> zbuf_;
};

/// Physics JSON keyed by decimal segmentation id.
inline nlohmann::json physics_json(const SceneSpec& spec) {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t i = 0; i < spec.objects.size(); ++i) {
    const auto& o = spec.objects[i];
    const auto& s = spec.find_material(o.material)->surface;
    j[std::to_string(SceneSpec::segmentation_id(i))] = {{"name", o.name},
                                                        {"asset_id", o.asset_id},
                                                        {"material", o.material},
                                                        {"dynamic_friction", s.dynamic_friction},
                                                        {"static_friction", s.static_friction},
                                                        {"density", s.density},
                                                        {"restitution", s.restitution}};
  }
  return j;
}

inline std::map<std::uint32_t, SurfaceProperties> parse_physics_json(const nlohmann::json& j) {
  std::map<std::uint32_t, SurfaceProperties> out;
  for (const auto& [key, v] : j.items())
    out[static_cast<std::uint32_t>(std::stoul(key))] = {v.at("dynamic_friction").get<double>(),
                                                        v.at("static_friction").get<double>(),
                                                        v.at("density").get<double>(), v.at("restitution").get<double>()};
  return out;
}

struct AnnotationSummary {
  std::vector<std::filesystem::path> files;     // in write order
  std::set<std::uint32_t> ids_in_rasters;       // every nonzero id seen in any segmentation
};

/// Writes, under out_dir:
///   cam_CC/depth_FFFF.piod, cam_CC/seg_FFFF.pios16 per camera and frame,
///   trajectory.jsonl (one line per frame and object), physics.json.
/// Depth and segmentation are particle-splat proxies, not renders. Continuum
/// objects report their centre of mass with an identity quaternion.
inline AnnotationSummary write_annotations(const SceneSpec& spec, const std::vector<FrameSnapshot>& frames,
                                           const std::vector<std::vector<camgen::CameraPose>>& cameras,
                                           const std::filesystem::path& out_dir,
                                           const std::filesystem::path& base_dir = {}) {
  if (frames.empty()) throw Error(Errc::invalid_config, "write_annotations needs at least one frame");
  for (const auto& cam : cameras)
    if (cam.size() < frames.size()) throw Error(Errc::invalid_config, "camera track shorter than the frame sequence");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(Errc::io_failure, "cannot create " + out_dir.string() + ": " + ec.message());

  // Surface samples of rigid objects in their local frame (relative to the scene pose).
  const double spacing = spec.sim.config.dx;
  std::map<std::uint32_t, std::vector<Vec3>> rigid_local;
  for (std::size_t i = 0; i < spec.objects.size(); ++i) {
    const auto& o = spec.objects[i];
    if (is_continuum(o.object_class)) continue;
    const Quat inv = o.orientation.normalized().conjugate();
    auto pts = surface_samples(object_mesh(o, base_dir), spacing);
    for (auto& p : pts) p = inv * (p - o.position);
    rigid_local[SceneSpec::segmentation_id(i)] = std::move(pts);
  }
  auto rigid_pose = [&](const FrameSnapshot& f, std::size_t i) {
    const auto it = f.rigid.find(SceneSpec::segmentation_id(i));
    if (it != f.rigid.end()) return it->second;
    return RigidPose{spec.objects[i].position, spec.objects[i].orientation.normalized()};
  };

  AnnotationSummary summary;
  std::vector<std::set<std::uint32_t>> seen(cameras.size() * frames.size());
  for (std::size_t c = 0; c < cameras.size(); ++c) {
    char dir[32];
    std::snprintf(dir, sizeof dir, "cam_%02zu", c);
    std::filesystem::create_directories(out_dir / dir, ec);
    if (ec) throw Error(Errc::io_failure, "cannot create camera directory: " + ec.message());
    parallel_for(frames.size(), [&](std::size_t f) {
      SplatRenderer r(cameras[c][f], spec.annotation);
      const auto& snap = frames[f];
      for (std::size_t p = 0; p < snap.particles.size(); ++p)
        r.splat(snap.particles.x[p], static_cast<std::uint16_t>(snap.particles.object_id[p]));
      for (const auto& [id, pts] : rigid_local) {
        const auto pose = rigid_pose(snap, id - 1);
        for (const auto& q : pts) r.splat(pose.position + pose.orientation * q, static_cast<std::uint16_t>(id));
      }
      char name[32];
      std::snprintf(name, sizeof name, "depth_%04zu.piod", f);
      save_piod(r.depth(), out_dir / dir / name);
      std::snprintf(name, sizeof name, "seg_%04zu.pios16", f);
      save_pios16(r.segmentation(), out_dir / dir / name);
      for (auto id : r.segmentation().ids)
        if (id) seen[c * frames.size() + f].insert(id);
    });
    for (std::size_t f = 0; f < frames.size(); ++f) {
      char name[32];
      std::snprintf(name, sizeof name, "depth_%04zu.piod", f);
      summary.files.push_back(out_dir / dir / name);
      std::snprintf(name, sizeof name, "seg_%04zu.pios16", f);
      summary.files.push_back(out_dir / dir / name);
    }
  }
  for (const auto& s : seen) summary.ids_in_rasters.insert(s.begin(), s.end());

  const auto traj_path = out_dir / "trajectory.jsonl";
  std::ofstream traj(traj_path);
  if (!traj) throw Error(Errc::io_failure, "cannot write " + traj_path.string());
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const auto& snap = frames[f];
    std::map<std::uint32_t, std::pair<Vec3, double>> com;
    for (std::size_t p = 0; p < snap.particles.size(); ++p) {
      auto& [sum, mass] = com[snap.particles.object_id[p]];
      if (mass == 0.0) sum = Vec3::Zero();
      sum += snap.particles.mass[p] * snap.particles.x[p];
      mass += snap.particles.mass[p];
    }
    for (std::size_t i = 0; i < spec.objects.size(); ++i) {
      const auto id = SceneSpec::segmentation_id(i);
      RigidPose pose;
      if (is_continuum(spec.objects[i].object_class)) {
        const auto it = com.find(id);
        pose.position = it != com.end() && it->second.second > 0.0 ? Vec3(it->second.first / it->second.second)
                                                                   : spec.objects[i].position;
      } else {
        pose = rigid_pose(snap, i);
      }
      const auto& q = pose.orientation;
      nlohmann::json line{{"frame", f},
                          {"object_id", id},
                          {"position", {pose.position.x(), pose.position.y(), pose.position.z()}},
                          {"quaternion", {q.w(), q.x(), q.y(), q.z()}}};
      traj << line.dump() << '\n';
    }
  }
  if (!traj) throw Error(Errc::io_failure, "write failed for " + traj_path.string());
  traj.close();
  summary.files.push_back(traj_path);

  const auto phys_path = out_dir / "physics.json";
  std::ofstream phys(phys_path);
  if (!phys) throw Error(Errc::io_failure, "cannot write " + phys_path.string());
  phys << physics_json(spec).dump(2) << '\n';
  if (!phys) throw Error(Errc::io_failure, "write failed for " + phys_path.string());
  phys.close();
  summary.files.push_back(phys_path);
  return summary;
}

}  // namespace physkit::scenegen
