#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <span>
#include <string>

#include "physkit/error.hpp"

namespace physkit::forces {

using Vec3 = Eigen::Vector3d;

/// Two-pole magnet. The field of a magnet is q (r_N/|r_N|^3 - r_S/|r_S|^3).
struct Magnet {
  Vec3 pole_n = Vec3::Zero();
  Vec3 pole_s = Vec3::Zero();
  double strength = 1.0;
  Vec3 center_of_mass = Vec3::Zero();
};

struct Wrench {
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();
};

inline void validate(const Magnet& m) {
  if ((m.pole_n - m.pole_s).norm() <= 0.0) throw Error(Errc::invalid_config, "magnet poles coincide");
  if (!(m.strength > 0.0)) throw Error(Errc::invalid_config, "magnet pole strength must be positive");
}

inline constexpr double pole_tolerance = 1e-9;

inline Vec3 dipole_field(const Vec3& p, const Magnet& m) {
  const Vec3 rn = p - m.pole_n;
  const Vec3 rs = p - m.pole_s;
  const double dn = rn.norm(), ds = rs.norm();
  if (dn <= pole_tolerance || ds <= pole_tolerance)
    throw Error(Errc::pole_singularity, "field sampled at a magnet pole");
  return m.strength * (rn / (dn * dn * dn) - rs / (ds * ds * ds));
}

/// Force and torque (about the target's center of mass) that `source` exerts on `target`.
inline Wrench magnet_wrench(const Magnet& source, const Magnet& target) {
  const Vec3 fn = target.strength * dipole_field(target.pole_n, source);
  const Vec3 fs = -target.strength * dipole_field(target.pole_s, source);
  Wrench w;
  w.force = fn + fs;
  w.torque = (target.pole_n - target.center_of_mass).cross(fn) + (target.pole_s - target.center_of_mass).cross(fs);
  return w;
}

/// Any unit vector orthogonal to d.
inline Vec3 any_perpendicular(const Vec3& d) {
  const Vec3 axis = std::abs(d.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  return d.cross(axis).normalized();
}

/// Box-shaped wind region starting at the source plane through `origin` and
/// extending `length` along `direction`. Magnitude falls off as 1 - (s/L)^2.
struct WindField {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3::UnitX();
  double length = 1.0;
  Vec3 lateral = Vec3::Zero();  // first cross-section axis; zero picks one
  double half_width = 0.5;      // along lateral
  double half_height = 0.5;     // along direction x lateral
  double peak_force = 0.0;
};

inline void validate(const WindField& f) {
  if (std::abs(f.direction.norm() - 1.0) > 1e-9) throw Error(Errc::invalid_config, "wind direction must be unit");
  if (!(f.length > 0.0)) throw Error(Errc::invalid_config, "wind length must be positive");
  if (!(f.peak_force >= 0.0)) throw Error(Errc::invalid_config, "wind peak force must be >= 0");
  if (!(f.half_width > 0.0) || !(f.half_height > 0.0))
    throw Error(Errc::invalid_config, "wind cross-section must be positive");
}

inline Vec3 wind_force(const WindField& f, const Vec3& p) {
  const Vec3 rel = p - f.origin;
  const double s = rel.dot(f.direction);
  if (s < 0.0 || s > f.length) return Vec3::Zero();
  Vec3 u = f.lateral - f.lateral.dot(f.direction) * f.direction;
  u = u.norm() > 1e-12 ? Vec3(u.normalized()) : any_perpendicular(f.direction);
  const Vec3 w = f.direction.cross(u);
  if (std::abs(rel.dot(u)) > f.half_width || std::abs(rel.dot(w)) > f.half_height) return Vec3::Zero();
  const double r = s / f.length;
  return f.peak_force * (1.0 - r * r) * f.direction;
}

inline Vec3 reflect_ray(const Vec3& d, const Vec3& n) {
  const double dn = d.dot(n);
  if (!(dn < 0.0)) throw Error(Errc::non_incident, "ray does not hit the front of the surface");
  return d - 2.0 * dn * n;
}

struct SphParticleView {
  double mass = 0.0;
  double density = 0.0;
  double pressure = 0.0;
  Vec3 velocity = Vec3::Zero();
  Vec3 position = Vec3::Zero();
  double smoothing_length = 0.0;
};

/// Gradient of the spiky kernel with support radius h, evaluated at r = x_i - x_j.
inline Vec3 spiky_gradient(const Vec3& r, double h) {
  const double d = r.norm();
  if (d <= 0.0 || d >= h) return Vec3::Zero();
  const double h3 = h * h * h;
  const double c = -45.0 / (std::numbers::pi * h3 * h3) * (h - d) * (h - d) / d;
  return c * r;
}

/// Laplacian of the viscosity kernel with support radius h.
inline double viscosity_laplacian(double d, double h) {
  if (d >= h) return 0.0;
  const double h3 = h * h * h;
  return 45.0 / (std::numbers::pi * h3 * h3) * (h - d);
}

namespace detail {
inline void require_density(const SphParticleView& p) {
  if (!(p.density > 0.0)) throw Error(Errc::zero_density, "SPH density must be positive");
  if (!(p.smoothing_length > 0.0)) throw Error(Errc::invalid_config, "SPH smoothing length must be positive");
}
}  // namespace detail

inline Vec3 sph_pressure_force(const SphParticleView& i, std::span<const SphParticleView> neighbors) {
  detail::require_density(i);
  Vec3 f = Vec3::Zero();
  for (const auto& j : neighbors) {
    detail::require_density(j);
    const double h = 0.5 * (i.smoothing_length + j.smoothing_length);
    const double coef = (i.mass * j.mass) * (i.pressure + j.pressure) / (2.0 * (i.density * j.density));
    f -= coef * spiky_gradient(i.position - j.position, h);
  }
  return f;
}

/// Viscous force oriented so that it damps relative motion.
inline Vec3 sph_viscous_force(const SphParticleView& i, std::span<const SphParticleView> neighbors, double mu) {
  detail::require_density(i);
  Vec3 f = Vec3::Zero();
  for (const auto& j : neighbors) {
    detail::require_density(j);
    const double h = 0.5 * (i.smoothing_length + j.smoothing_length);
    const double lap = viscosity_laplacian((i.position - j.position).norm(), h);
    f += 0.5 * mu * (j.velocity - i.velocity) / (i.density + j.density) * lap;
  }
  return f;
}

}  // namespace physkit::forces
