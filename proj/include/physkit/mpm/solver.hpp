#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "physkit/constitutive/models.hpp"
#include "physkit/error.hpp"
#include "physkit/forces/forces.hpp"
#include "physkit/mpm/kernel.hpp"
#include "physkit/mpm/particles.hpp"
#include "physkit/mpm/sdf.hpp"
#include "physkit/parallel.hpp"

namespace physkit::mpm {

using constitutive::MaterialModel;

struct BoundaryConfig {
  bool enabled = true;
  ContactMode mode = ContactMode::separate;
  double friction = 0.0;
  int margin = 3;  // nodes from each wall that see the wall
};

struct SimConfig {
  double dt = 1.0 / 150.0;
  double dx = 0.0083;
  Vec3 gravity = Vec3(0.0, 0.0, -9.8);
  int substeps_per_frame = 5;
  double frame_rate = 30.0;
  Vec3 domain_lo = Vec3::Zero();
  Vec3 domain_hi = Vec3::Ones();
  std::uint64_t seed = 0;
  BoundaryConfig boundary;
};

inline constexpr double empty_node_mass = 1e-12;

inline void validate(const SimConfig& cfg) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw Error(Errc::invalid_config, "dt must be positive");
  if (!(cfg.dx > 0.0) || !std::isfinite(cfg.dx)) throw Error(Errc::invalid_config, "dx must be positive");
  if (!cfg.gravity.allFinite()) throw Error(Errc::invalid_config, "gravity must be finite");
  if (cfg.substeps_per_frame < 1) throw Error(Errc::invalid_config, "substeps_per_frame must be >= 1");
  if (!(cfg.frame_rate > 0.0)) throw Error(Errc::invalid_config, "frame_rate must be positive");
  for (int a = 0; a < 3; ++a)
    if (!(cfg.domain_hi[a] - cfg.domain_lo[a] >= 6.0 * cfg.dx))
      throw Error(Errc::invalid_config, "domain must span at least 6 cells per axis");
  if (cfg.boundary.margin < 0) throw Error(Errc::invalid_config, "boundary margin must be >= 0");
  if (cfg.boundary.friction < 0.0) throw Error(Errc::invalid_config, "boundary friction must be >= 0");
}

struct PlaneCollider {
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  ContactMode mode = ContactMode::sticky;
  double friction = 0.0;
};

struct SphereCollider {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
  ContactMode mode = ContactMode::sticky;
  double friction = 0.0;
};

using AnalyticCollider = std::variant<PlaneCollider, SphereCollider>;

/// Everything grid_update needs beyond the grid: external forces and colliders.
struct SceneForces {
  std::vector<AnalyticCollider> primitives;
  std::vector<VoxelSDF> sdfs;
  std::vector<forces::WindField> winds;
};

struct GridState {
  Vec3 origin = Vec3::Zero();
  double dx = 1.0;
  std::array<int, 3> nodes{0, 0, 0};
  std::vector<double> mass;
  std::vector<Vec3> momentum;
  std::vector<Vec3> velocity;
  std::vector<std::uint32_t> active;  // nodes touched this substep, in first-touch order
  std::vector<unsigned char> touched;

  GridState() = default;
  GridState(const Vec3& lo, const Vec3& hi, double spacing) : origin(lo), dx(spacing) {
    for (int a = 0; a < 3; ++a) nodes[a] = static_cast<int>(std::lround((hi[a] - lo[a]) / spacing)) + 1;
    const std::size_t n = node_count();
    mass.assign(n, 0.0);
    momentum.assign(n, Vec3::Zero());
    velocity.assign(n, Vec3::Zero());
    touched.assign(n, 0);
  }

  std::size_t node_count() const { return static_cast<std::size_t>(nodes[0]) * nodes[1] * nodes[2]; }
  std::size_t index(int i, int j, int k) const { return (static_cast<std::size_t>(k) * nodes[1] + j) * nodes[0] + i; }
  std::array<int, 3> coords(std::size_t idx) const {
    return {static_cast<int>(idx % nodes[0]), static_cast<int>((idx / nodes[0]) % nodes[1]),
            static_cast<int>(idx / (static_cast<std::size_t>(nodes[0]) * nodes[1]))};
  }
  Vec3 position(std::size_t idx) const {
    const auto c = coords(idx);
    return origin + dx * Vec3(c[0], c[1], c[2]);
  }

  void clear() {
    for (auto idx : active) {
      mass[idx] = 0.0;
      momentum[idx].setZero();
      velocity[idx].setZero();
      touched[idx] = 0;
    }
    active.clear();
  }

  double total_mass() const {
    double m = 0.0;
    for (auto idx : active) m += mass[idx];
    return m;
  }
  Vec3 total_momentum() const {
    Vec3 p = Vec3::Zero();
    for (auto idx : active) p += momentum[idx];
    return p;
  }
};

inline GridState make_grid(const SimConfig& cfg) { return GridState(cfg.domain_lo, cfg.domain_hi, cfg.dx); }

namespace detail {

inline QuadraticStencil stencil_in_grid(const GridState& grid, const Vec3& x, std::size_t particle) {
  if (!x.allFinite()) throw Error(Errc::numerical_instability, "particle " + std::to_string(particle) + " is not finite");
  const auto s = quadratic_stencil((x - grid.origin) / grid.dx);
  for (int a = 0; a < 3; ++a)
    if (s.base[a] < 0 || s.base[a] + 2 >= grid.nodes[a])
      throw Error(Errc::particle_out_of_domain, "particle " + std::to_string(particle) + " stencil leaves the grid");
  return s;
}

struct ScatterItem {
  QuadraticStencil stencil;
  Vec3 momentum;  // m v
  Mat3 affine;    // m C - dt V0 D^-1 tau
};

}  // namespace detail

/// Particle-to-grid transfer. Updates each particle's F (trial update, plastic
/// projection, fluid reset) and scatters mass and APIC momentum.
inline void p2g(ParticleSet& particles, const std::vector<MaterialModel>& materials, GridState& grid, double dt) {
  grid.clear();
  const double inv_d = 4.0 / (grid.dx * grid.dx);
  const std::size_t n = particles.size();
  std::vector<detail::ScatterItem> items(n);
  parallel_for(n, [&](std::size_t p) {
    auto& item = items[p];
    item.stencil = detail::stencil_in_grid(grid, particles.x[p], p);
    const auto mat_id = particles.material_id[p];
    if (mat_id >= materials.size())
      throw Error(Errc::invalid_config, "particle " + std::to_string(p) + " references a missing material");
    const auto& material = materials[mat_id];
    const Mat3& C = particles.C[p];
    const Mat3 F_trial = (Mat3::Identity() + dt * C) * particles.F[p];
    auto update = constitutive::project_and_stress(material, F_trial, C, dt);
    if (std::holds_alternative<constitutive::NewtonianFluid>(material))
      update.F = std::cbrt(update.F.determinant()) * Mat3::Identity();
    particles.F[p] = update.F;
    const double m = particles.mass[p];
    item.momentum = m * particles.v[p];
    item.affine = m * C - (dt * particles.volume0[p] * inv_d) * update.kirchhoff;
  });
  // Serial scatter keeps the accumulation order fixed.
  for (std::size_t p = 0; p < n; ++p) {
    const auto& item = items[p];
    const auto& s = item.stencil;
    const double m = particles.mass[p];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
          const double w = s.weight(i, j, k);
          const auto idx = grid.index(s.base[0] + i, s.base[1] + j, s.base[2] + k);
          if (!grid.touched[idx]) {
            grid.touched[idx] = 1;
            grid.active.push_back(static_cast<std::uint32_t>(idx));
          }
          grid.mass[idx] += w * m;
          grid.momentum[idx] += w * (item.momentum + item.affine * s.dpos(i, j, k, grid.dx));
        }
  }
}

namespace detail {

inline Vec3 apply_boundary(const GridState& grid, const BoundaryConfig& b, const std::array<int, 3>& c, Vec3 v) {
  for (int a = 0; a < 3; ++a) {
    if (c[a] < b.margin) v = apply_contact(v, Vec3::Unit(a), b.mode, b.friction);
    if (c[a] > grid.nodes[a] - 1 - b.margin) v = apply_contact(v, -Vec3::Unit(a), b.mode, b.friction);
  }
  return v;
}

inline Vec3 apply_primitive(const AnalyticCollider& collider, const Vec3& x, const Vec3& v) {
  return std::visit(
      [&](const auto& c) -> Vec3 {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, PlaneCollider>) {
          if ((x - c.point).dot(c.normal) > 0.0) return v;
          return apply_contact(v, c.normal, c.mode, c.friction);
        } else {
          const Vec3 r = x - c.center;
          const double d = r.norm();
          if (d >= c.radius || d <= 0.0) return v;
          return apply_contact(v, r / d, c.mode, c.friction);
        }
      },
      collider);
}

}  // namespace detail

/// Normalise momenta, add gravity and external force fields, then run the
/// colliders in order: domain box, analytic primitives, voxel SDFs.
inline void grid_update(GridState& grid, const SimConfig& cfg, const SceneForces& scene = {}) {
  const double dt = cfg.dt;
  parallel_for(grid.active.size(), [&](std::size_t a) {
    const auto idx = grid.active[a];
    const double m = grid.mass[idx];
    if (m <= empty_node_mass) {
      grid.velocity[idx].setZero();
      return;
    }
    Vec3 v = grid.momentum[idx] / m;
    v += dt * cfg.gravity;
    const Vec3 x = grid.position(idx);
    for (const auto& wind : scene.winds) v += dt * forces::wind_force(wind, x);
    if (cfg.boundary.enabled) v = detail::apply_boundary(grid, cfg.boundary, grid.coords(idx), v);
    for (const auto& c : scene.primitives) v = detail::apply_primitive(c, x, v);
    for (const auto& sdf : scene.sdfs) {
      const auto s = sdf.sample(x);
      if (s.distance <= 0.0 && s.normal.squaredNorm() > 0.0) v = apply_contact(v, s.normal, sdf.contact_mode, sdf.friction);
    }
    grid.velocity[idx] = v;
  });
}

/// Grid-to-particle transfer and advection. Positions are kept two cells
/// inside the domain.
inline void g2p(const GridState& grid, ParticleSet& particles, double dt) {
  const double inv_d = 4.0 / (grid.dx * grid.dx);
  const Vec3 lo = grid.origin + Vec3::Constant(2.0 * grid.dx);
  const Vec3 hi = grid.origin + grid.dx * Vec3(grid.nodes[0] - 1, grid.nodes[1] - 1, grid.nodes[2] - 1) -
                  Vec3::Constant(2.0 * grid.dx);
  std::vector<unsigned char> bad(particles.size(), 0);
  parallel_for(particles.size(), [&](std::size_t p) {
    const auto s = detail::stencil_in_grid(grid, particles.x[p], p);
    Vec3 v = Vec3::Zero();
    Mat3 B = Mat3::Zero();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
          const double w = s.weight(i, j, k);
          const Vec3& vi = grid.velocity[grid.index(s.base[0] + i, s.base[1] + j, s.base[2] + k)];
          v += w * vi;
          B += w * vi * s.dpos(i, j, k, grid.dx).transpose();
        }
    particles.v[p] = v;
    particles.C[p] = inv_d * B;
    particles.x[p] = (particles.x[p] + dt * v).cwiseMax(lo).cwiseMin(hi);
    bad[p] = !(v.allFinite() && particles.C[p].allFinite() && particles.F[p].allFinite());
  });
  for (std::size_t p = 0; p < bad.size(); ++p)
    if (bad[p]) throw Error(Errc::numerical_instability, "particle " + std::to_string(p) + " went non-finite");
}

struct StepStats {
  double max_speed = 0.0;
  bool cfl_warning = false;  // max speed * dt >= dx
};

/// One substep: p2g, grid_update, g2p.
inline StepStats step(ParticleSet& particles, const std::vector<MaterialModel>& materials, GridState& grid,
                      const SimConfig& cfg, const SceneForces& scene = {}) {
  p2g(particles, materials, grid, cfg.dt);
  grid_update(grid, cfg, scene);
  g2p(grid, particles, cfg.dt);
  StepStats stats;
  stats.max_speed = max_speed(particles);
  stats.cfl_warning = stats.max_speed * cfg.dt >= cfg.dx;
  return stats;
}

/// Owns the state of one simulation run.
class Simulation {
 public:
  Simulation(SimConfig cfg, std::vector<MaterialModel> materials, ParticleSet particles, SceneForces scene = {})
      : cfg_(std::move(cfg)), materials_(std::move(materials)), particles_(std::move(particles)), scene_(std::move(scene)) {
    validate(cfg_);
    for (const auto& m : materials_) constitutive::validate(m);
    for (const auto& w : scene_.winds) forces::validate(w);
    grid_ = make_grid(cfg_);
  }

  StepStats substep() {
    auto s = step(particles_, materials_, grid_, cfg_, scene_);
    ++substeps_;
    cfl_warnings_ += s.cfl_warning;
    return s;
  }

  StepStats advance_frame() {
    StepStats worst;
    for (int i = 0; i < cfg_.substeps_per_frame; ++i) {
      const auto s = substep();
      worst.max_speed = std::max(worst.max_speed, s.max_speed);
      worst.cfl_warning = worst.cfl_warning || s.cfl_warning;
    }
    return worst;
  }

  double time() const { return static_cast<double>(substeps_) * cfg_.dt; }
  std::uint64_t substeps() const { return substeps_; }
  std::uint64_t cfl_warnings() const { return cfl_warnings_; }
  const ParticleSet& particles() const { return particles_; }
  ParticleSet& particles() { return particles_; }
  const GridState& grid() const { return grid_; }
  const SimConfig& config() const { return cfg_; }
  const std::vector<MaterialModel>& materials() const { return materials_; }

 private:
  SimConfig cfg_;
  std::vector<MaterialModel> materials_;
  ParticleSet particles_;
  SceneForces scene_;
  GridState grid_;
  std::uint64_t substeps_ = 0;
  std::uint64_t cfl_warnings_ = 0;
};

}  // namespace physkit::mpm
