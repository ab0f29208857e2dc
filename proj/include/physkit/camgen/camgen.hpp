#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "physkit/error.hpp"
#include "physkit/random.hpp"

namespace physkit::camgen {

using Vec3 = Eigen::Vector3d;
using Mat4 = Eigen::Matrix4d;

struct SphericalPoint {
  double latitude = 0.0;   // degrees
  double longitude = 0.0;  // degrees, may be unwrapped past 360
  double radius_factor = 1.0;
};

struct CameraPose {
  Vec3 position = Vec3::Zero();
  Vec3 look_at = Vec3::Zero();
  Vec3 up = Vec3::UnitZ();
};

enum class Strategy { linear_drift, sinusoidal, circular_loop };
enum class Hemisphere { upper, lower, both };

inline std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::linear_drift: return "linear_drift";
    case Strategy::sinusoidal: return "sinusoidal";
    case Strategy::circular_loop: return "circular_loop";
  }
  return "?";
}

inline Strategy parse_strategy(const std::string& s) {
  if (s == "linear_drift") return Strategy::linear_drift;
  if (s == "sinusoidal") return Strategy::sinusoidal;
  if (s == "circular_loop") return Strategy::circular_loop;
  throw Error(Errc::invalid_config, "unknown camera strategy '" + s + "'");
}

inline Hemisphere parse_hemisphere(const std::string& s) {
  if (s == "upper") return Hemisphere::upper;
  if (s == "lower") return Hemisphere::lower;
  if (s == "both") return Hemisphere::both;
  throw Error(Errc::invalid_config, "unknown hemisphere '" + s + "'");
}

inline std::string to_string(Hemisphere h) {
  switch (h) {
    case Hemisphere::upper: return "upper";
    case Hemisphere::lower: return "lower";
    case Hemisphere::both: return "both";
  }
  return "?";
}

struct TrajectoryConfig {
  Strategy strategy = Strategy::linear_drift;
  Hemisphere hemisphere = Hemisphere::both;
  double base_radius = 1.0;
  int n_frames = 30;
  std::uint64_t seed = 0;
  Vec3 center = Vec3::Zero();
  double drift_sigma = 5.0;             // degrees
  double loop_intensity = 15.0;         // degrees
  int loop_points = 16;
  std::optional<SphericalPoint> loop_center;
  double radius_amplitude = 0.1;        // sinusoidal radius modulation
  double loop_radius_amplitude = 0.0;   // optional loop radius modulation
};

inline void validate(const TrajectoryConfig& cfg) {
  if (cfg.n_frames < 2) throw Error(Errc::invalid_config, "n_frames must be >= 2");
  if (!(cfg.base_radius > 0.0)) throw Error(Errc::invalid_config, "base_radius must be positive");
  if (!(cfg.drift_sigma >= 0.0)) throw Error(Errc::invalid_config, "drift_sigma must be >= 0");
  if (!(cfg.loop_intensity >= 0.0)) throw Error(Errc::invalid_config, "loop_intensity must be >= 0");
  if (cfg.loop_points < 2) throw Error(Errc::invalid_config, "loop_points must be >= 2");
  if (!(std::abs(cfg.radius_amplitude) < 1.0) || !(std::abs(cfg.loop_radius_amplitude) < 1.0))
    throw Error(Errc::invalid_config, "radius amplitude must be in (-1, 1)");
}

inline constexpr double max_control_latitude = 45.0;

/// Latitude band for control points: [-45, 45] restricted to the hemisphere.
inline std::pair<double, double> latitude_band(Hemisphere h) {
  switch (h) {
    case Hemisphere::upper: return {0.0, max_control_latitude};
    case Hemisphere::lower: return {-max_control_latitude, 0.0};
    case Hemisphere::both: return {-max_control_latitude, max_control_latitude};
  }
  return {-max_control_latitude, max_control_latitude};
}

inline double radians(double deg) { return deg * std::numbers::pi / 180.0; }

inline Vec3 direction(double lat_deg, double lon_deg) {
  const double la = radians(lat_deg), lo = radians(lon_deg);
  return {std::cos(la) * std::cos(lo), std::cos(la) * std::sin(lo), std::sin(la)};
}

namespace detail {

/// World up projected off the viewing direction; falls back to `previous`
/// (or an arbitrary horizontal axis) when looking almost straight up or down.
inline Vec3 camera_up(const Vec3& forward, double lat_deg, const std::optional<Vec3>& previous) {
  Vec3 up;
  if (std::abs(lat_deg) <= 89.0) {
    up = Vec3::UnitZ();
  } else if (previous) {
    up = *previous;
  } else {
    up = Vec3::UnitX();
  }
  up -= up.dot(forward) * forward;
  if (up.norm() < 1e-9) {
    up = Vec3::UnitY() - Vec3::UnitY().dot(forward) * forward;
  }
  return up.normalized();
}

inline CameraPose pose_at(const SphericalPoint& p, double base_radius, const Vec3& center,
                          const std::optional<Vec3>& previous_up) {
  const double lat = std::clamp(p.latitude, -90.0, 90.0);
  CameraPose pose;
  pose.position = center + p.radius_factor * base_radius * direction(lat, p.longitude);
  pose.look_at = center;
  const Vec3 forward = (center - pose.position).normalized();
  pose.up = camera_up(forward, lat, previous_up);
  return pose;
}

}  // namespace detail

/// Camera-to-world transform (row-major when read row by row): columns are
/// right, up, backward (camera looks down -z) and position.
inline Mat4 camera_to_world(const CameraPose& pose) {
  const Vec3 forward = (pose.look_at - pose.position).normalized();
  const Vec3 right = forward.cross(pose.up).normalized();
  const Vec3 up = right.cross(forward);
  Mat4 m = Mat4::Identity();
  m.block<3, 1>(0, 0) = right;
  m.block<3, 1>(0, 1) = up;
  m.block<3, 1>(0, 2) = -forward;
  m.block<3, 1>(0, 3) = pose.position;
  return m;
}

using VisibilityPredicate = std::function<bool(const CameraPose&)>;

/// Evenly spaced azimuths with random elevation in [30, 60] degrees. An
/// optional visibility predicate triggers elevation resampling (32 tries).
inline std::vector<CameraPose> sample_static_ring(int n, double base_radius, const Vec3& center, std::uint64_t seed,
                                                  const VisibilityPredicate& visible = {}) {
  if (n < 1) throw Error(Errc::invalid_config, "static ring needs at least one camera");
  if (!(base_radius > 0.0)) throw Error(Errc::invalid_config, "base_radius must be positive");
  Rng rng(seed);
  std::vector<CameraPose> poses;
  poses.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double azimuth = 360.0 * i / n;
    CameraPose pose = detail::pose_at({rng.uniform(30.0, 60.0), azimuth, 1.0}, base_radius, center, std::nullopt);
    for (int attempt = 0; visible && !visible(pose) && attempt < 32; ++attempt)
      pose = detail::pose_at({rng.uniform(30.0, 60.0), azimuth, 1.0}, base_radius, center, std::nullopt);
    poses.push_back(pose);
  }
  return poses;
}

inline std::vector<SphericalPoint> sample_linear_drift(const TrajectoryConfig& cfg) {
  validate(cfg);
  Rng rng(cfg.seed);
  const auto [lo, hi] = latitude_band(cfg.hemisphere);
  const int n = static_cast<int>(rng.integer(10, 20));
  const double start = rng.uniform(0.0, 360.0);
  const double dir = rng.uniform() < 0.5 ? -1.0 : 1.0;
  const double step = 180.0 / (n - 1);
  std::vector<SphericalPoint> pts;
  pts.reserve(static_cast<std::size_t>(n));
  double lat = rng.uniform(lo, hi);
  for (int k = 0; k < n; ++k) {
    if (k > 0) {
      double next = lat;
      bool found = false;
      for (int attempt = 0; attempt < 32 && !found; ++attempt) {
        next = lat + rng.normal(0.0, cfg.drift_sigma);
        found = next >= lo && next <= hi;
      }
      lat = found ? next : std::clamp(lat, lo, hi);
    }
    pts.push_back({lat, start + dir * step * k, 1.0});
  }
  return pts;
}

/// Raised-cosine easing between a random start and end point.
inline std::vector<SphericalPoint> sample_sinusoidal(const TrajectoryConfig& cfg, int n_points = 0) {
  validate(cfg);
  Rng rng(cfg.seed);
  const auto [lo, hi] = latitude_band(cfg.hemisphere);
  const int n = n_points > 1 ? n_points : static_cast<int>(rng.integer(10, 20));
  const SphericalPoint a{rng.uniform(lo, hi), rng.uniform(0.0, 360.0), 1.0};
  SphericalPoint b{rng.uniform(lo, hi), 0.0, 1.0};
  b.longitude = a.longitude + rng.uniform(-180.0, 180.0);
  std::vector<SphericalPoint> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double u = static_cast<double>(k) / (n - 1);
    const double e = (1.0 - std::cos(std::numbers::pi * u)) / 2.0;
    SphericalPoint p;
    p.latitude = k == n - 1 ? b.latitude : a.latitude + (b.latitude - a.latitude) * e;
    p.longitude = k == n - 1 ? b.longitude : a.longitude + (b.longitude - a.longitude) * e;
    p.radius_factor = 1.0 + cfg.radius_amplitude * std::sin(std::numbers::pi * u);
    pts.push_back(p);
  }
  return pts;
}

/// Loop of `loop_points` evenly spaced angles around a center; latitudes
/// are clipped to the hemisphere band.
inline std::vector<SphericalPoint> sample_circular_loop(const TrajectoryConfig& cfg) {
  validate(cfg);
  Rng rng(cfg.seed);
  const auto [lo, hi] = latitude_band(cfg.hemisphere);
  const double I = cfg.loop_intensity;
  SphericalPoint c;
  if (cfg.loop_center) {
    c = *cfg.loop_center;
  } else {
    // Keep the whole loop inside the band when it fits.
    const double clo = 2.0 * I <= hi - lo ? lo + I : 0.5 * (lo + hi);
    const double chi = 2.0 * I <= hi - lo ? hi - I : 0.5 * (lo + hi);
    c.latitude = rng.uniform(clo, chi);
    c.longitude = rng.uniform(0.0, 360.0);
  }
  const int n = cfg.loop_points;
  std::vector<SphericalPoint> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / n;
    SphericalPoint p;
    p.latitude = std::clamp(c.latitude + I * std::cos(theta), lo, hi);
    p.longitude = c.longitude + I * std::sin(theta);
    p.radius_factor = 1.0 + cfg.loop_radius_amplitude * std::sin(theta);
    pts.push_back(p);
  }
  return pts;
}

inline std::vector<SphericalPoint> sample_control_points(const TrajectoryConfig& cfg) {
  switch (cfg.strategy) {
    case Strategy::linear_drift: return sample_linear_drift(cfg);
    case Strategy::sinusoidal: return sample_sinusoidal(cfg);
    case Strategy::circular_loop: return sample_circular_loop(cfg);
  }
  return {};
}

/// Uniform choice among the three strategies.
inline Strategy pick_strategy(Rng& rng) { return static_cast<Strategy>(rng.below(3)); }

namespace detail {

/// Catmull-Rom tangents with Fritsch-Carlson limiting, so monotone data
/// yields a monotone curve.
inline std::vector<double> limited_tangents(const std::vector<double>& y) {
  const std::size_t n = y.size();
  std::vector<double> m(n, 0.0);
  if (n < 2) return m;
  m[0] = y[1] - y[0];
  m[n - 1] = y[n - 1] - y[n - 2];
  for (std::size_t k = 1; k + 1 < n; ++k) m[k] = 0.5 * (y[k + 1] - y[k - 1]);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double delta = y[k + 1] - y[k];
    if (delta == 0.0) {
      m[k] = 0.0;
      m[k + 1] = 0.0;
      continue;
    }
    if (m[k] / delta < 0.0) m[k] = 0.0;
    if (m[k + 1] / delta < 0.0) m[k + 1] = 0.0;
    const double a = m[k] / delta, b = m[k + 1] / delta;
    const double s = a * a + b * b;
    if (s > 9.0) {
      const double tau = 3.0 / std::sqrt(s);
      m[k] = tau * a * delta;
      m[k + 1] = tau * b * delta;
    }
  }
  return m;
}

inline double hermite(double p0, double p1, double m0, double m1, double t) {
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * p0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * p1 + (t3 - t2) * m1;
}

}  // namespace detail

/// Resamples control points to one spherical point per frame along a clamped
/// Catmull-Rom spline in (latitude, unwrapped longitude, radius factor).
inline std::vector<SphericalPoint> interpolate_points(const std::vector<SphericalPoint>& points, int n_frames) {
  if (points.size() < 2) throw Error(Errc::too_few_points, "trajectory needs at least two control points");
  if (n_frames < 2) throw Error(Errc::invalid_config, "n_frames must be >= 2");
  const std::size_t n = points.size();
  std::vector<double> lat(n), lon(n), rf(n);
  for (std::size_t k = 0; k < n; ++k) {
    lat[k] = points[k].latitude;
    rf[k] = points[k].radius_factor;
    lon[k] = points[k].longitude;
    if (k > 0) lon[k] = lon[k - 1] + std::remainder(points[k].longitude - lon[k - 1], 360.0);
  }
  lon[0] = points[0].longitude;
  const auto mlat = detail::limited_tangents(lat), mlon = detail::limited_tangents(lon),
             mrf = detail::limited_tangents(rf);
  std::vector<SphericalPoint> out;
  out.reserve(static_cast<std::size_t>(n_frames));
  for (int f = 0; f < n_frames; ++f) {
    SphericalPoint p;
    if (f == n_frames - 1) {
      p = {lat[n - 1], lon[n - 1], rf[n - 1]};
    } else {
      const double s = static_cast<double>(f) * static_cast<double>(n - 1) / (n_frames - 1);
      const std::size_t k = std::min(static_cast<std::size_t>(s), n - 2);
      const double t = s - static_cast<double>(k);
      p.latitude = detail::hermite(lat[k], lat[k + 1], mlat[k], mlat[k + 1], t);
      p.longitude = detail::hermite(lon[k], lon[k + 1], mlon[k], mlon[k + 1], t);
      p.radius_factor = detail::hermite(rf[k], rf[k + 1], mrf[k], mrf[k + 1], t);
    }
    out.push_back(p);
  }
  return out;
}

/// One pose per interpolated point.
inline std::vector<CameraPose> interpolate_trajectory(const std::vector<SphericalPoint>& points, int n_frames,
                                                      double base_radius, const Vec3& center) {
  if (!(base_radius > 0.0)) throw Error(Errc::invalid_config, "base_radius must be positive");
  const auto samples = interpolate_points(points, n_frames);
  std::vector<CameraPose> poses;
  poses.reserve(samples.size());
  std::optional<Vec3> previous_up;
  for (const auto& p : samples) {
    auto pose = detail::pose_at(p, base_radius, center, previous_up);
    previous_up = pose.up;
    poses.push_back(pose);
  }
  return poses;
}

inline std::vector<CameraPose> generate_trajectory(const TrajectoryConfig& cfg) {
  return interpolate_trajectory(sample_control_points(cfg), cfg.n_frames, cfg.base_radius, cfg.center);
}

}  // namespace physkit::camgen
