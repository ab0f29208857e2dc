#include <gtest/gtest.h>

#include <cmath>

#include "physkit/camgen/camgen.hpp"

using namespace physkit;
using namespace physkit::camgen;

namespace {

TrajectoryConfig config(Strategy s, std::uint64_t seed, Hemisphere h = Hemisphere::both) {
  TrajectoryConfig cfg;
  cfg.strategy = s;
  cfg.seed = seed;
  cfg.hemisphere = h;
  cfg.base_radius = 3.0;
  cfg.n_frames = 60;
  cfg.center = Vec3(0.2, -0.1, 0.4);
  return cfg;
}

double elevation_deg(const CameraPose& p) {
  const Vec3 d = (p.position - p.look_at).normalized();
  return std::asin(d.z()) * 180.0 / std::numbers::pi;
}

double azimuth_deg(const CameraPose& p) {
  const Vec3 d = p.position - p.look_at;
  double a = std::atan2(d.y(), d.x()) * 180.0 / std::numbers::pi;
  return a < 0 ? a + 360.0 : a;
}

}  // namespace

TEST(StaticRing, TwelveCamerasEvenlySpaced) {
  const auto poses = sample_static_ring(12, 2.0, Vec3::Zero(), 7);
  ASSERT_EQ(poses.size(), 12u);
  for (int i = 0; i < 12; ++i) {
    EXPECT_NEAR(azimuth_deg(poses[i]), 30.0 * i, 1e-9);
    EXPECT_GE(elevation_deg(poses[i]), 30.0 - 1e-9);
    EXPECT_LE(elevation_deg(poses[i]), 60.0 + 1e-9);
    EXPECT_NEAR(poses[i].position.norm(), 2.0, 2e-9 * 2.0);
  }
  const auto single = sample_static_ring(1, 2.0, Vec3::Zero(), 3);
  EXPECT_NEAR(azimuth_deg(single[0]), 0.0, 1e-9);
}

TEST(StaticRing, DeterministicAndResamplesOccludedViews) {
  const auto a = sample_static_ring(8, 1.0, Vec3::Zero(), 11);
  const auto b = sample_static_ring(8, 1.0, Vec3::Zero(), 11);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].position, b[i].position);
  const auto high = sample_static_ring(8, 1.0, Vec3::Zero(), 11,
                                       [](const CameraPose& p) { return elevation_deg(p) > 50.0; });
  for (const auto& p : high) EXPECT_GT(elevation_deg(p), 50.0);
}

TEST(LinearDrift, EvenLongitudesAndBandedLatitudes) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto pts = sample_linear_drift(config(Strategy::linear_drift, seed, Hemisphere::upper));
    ASSERT_GE(pts.size(), 10u);
    ASSERT_LE(pts.size(), 20u);
    const double step = 180.0 / (pts.size() - 1);
    const double dir = pts[1].longitude > pts[0].longitude ? 1.0 : -1.0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      EXPECT_GE(pts[k].latitude, 0.0);
      EXPECT_LE(pts[k].latitude, 45.0);
      if (k > 0) {
        EXPECT_NEAR(pts[k].longitude - pts[k - 1].longitude, dir * step, 1e-12);
      }
    }
  }
}

TEST(LinearDrift, ZeroSigmaKeepsLatitude) {
  auto cfg = config(Strategy::linear_drift, 4);
  cfg.drift_sigma = 0.0;
  const auto pts = sample_linear_drift(cfg);
  for (const auto& p : pts) EXPECT_EQ(p.latitude, pts[0].latitude);
}

TEST(Sinusoidal, EasingEndpointsAndMidpoint) {
  auto cfg = config(Strategy::sinusoidal, 5);
  const auto pts = sample_sinusoidal(cfg, 11);
  ASSERT_EQ(pts.size(), 11u);
  const auto& a = pts.front();
  const auto& b = pts.back();
  EXPECT_NEAR(pts[5].latitude, 0.5 * (a.latitude + b.latitude), 1e-12);
  EXPECT_NEAR(pts[5].longitude, 0.5 * (a.longitude + b.longitude), 1e-12);
  EXPECT_NEAR(pts[5].radius_factor, 1.0 + cfg.radius_amplitude, 1e-12);
  EXPECT_EQ(a.radius_factor, 1.0);
  EXPECT_LE(std::abs(b.longitude - a.longitude), 180.0);
  cfg.radius_amplitude = 0.0;
  for (const auto& p : sample_sinusoidal(cfg)) EXPECT_EQ(p.radius_factor, 1.0);
}

TEST(CircularLoop, OffsetsAroundTheCenter) {
  auto cfg = config(Strategy::circular_loop, 6);
  cfg.loop_points = 4;
  cfg.loop_intensity = 10.0;
  cfg.loop_center = SphericalPoint{20.0, 100.0, 1.0};
  const auto pts = sample_circular_loop(cfg);
  ASSERT_EQ(pts.size(), 4u);
  EXPECT_NEAR(pts[0].latitude, 30.0, 1e-12);
  EXPECT_NEAR(pts[0].longitude, 100.0, 1e-12);
  EXPECT_NEAR(pts[1].latitude, 20.0, 1e-12);
  EXPECT_NEAR(pts[1].longitude, 110.0, 1e-12);
  EXPECT_NEAR(pts[2].latitude, 10.0, 1e-12);
  EXPECT_NEAR(pts[3].longitude, 90.0, 1e-12);

  cfg.loop_intensity = 0.0;
  for (const auto& p : sample_circular_loop(cfg)) {
    EXPECT_EQ(p.latitude, 20.0);
    EXPECT_EQ(p.longitude, 100.0);
  }
  cfg.loop_intensity = 10.0;
  cfg.loop_points = 24;
  cfg.hemisphere = Hemisphere::upper;
  cfg.loop_center = SphericalPoint{5.0, 0.0, 1.0};
  for (const auto& p : sample_circular_loop(cfg)) EXPECT_GE(p.latitude, 0.0);
}

TEST(Interpolation, EndpointsAndSphereConstraint) {
  const std::vector<SphericalPoint> two = {{10.0, 20.0, 1.0}, {30.0, 80.0, 1.0}};
  const auto poses = interpolate_trajectory(two, 2, 2.0, Vec3::Zero());
  ASSERT_EQ(poses.size(), 2u);
  EXPECT_LT((poses[0].position - 2.0 * direction(10.0, 20.0)).norm(), 1e-12);
  EXPECT_LT((poses[1].position - 2.0 * direction(30.0, 80.0)).norm(), 1e-12);
  for (const auto& p : interpolate_trajectory(two, 50, 2.0, Vec3(1, 2, 3)))
    EXPECT_NEAR((p.position - Vec3(1, 2, 3)).norm(), 2.0, 1e-9);
  EXPECT_THROW(interpolate_trajectory({two[0]}, 10, 1.0, Vec3::Zero()), Error);
}

TEST(Interpolation, MonotoneDataDoesNotOvershoot) {
  const std::vector<SphericalPoint> pts = {{0, 0, 1}, {1, 10, 1}, {20, 20, 1}, {21, 30, 1}, {40, 40, 1}};
  for (const auto& p : interpolate_trajectory(pts, 200, 1.0, Vec3::Zero())) {
    const double lat = elevation_deg(p);
    EXPECT_GE(lat, 0.0 - 1e-9);
    EXPECT_LE(lat, 40.0 + 1e-9);
  }
}

TEST(Interpolation, LongitudeUnwrapAvoidsWhiplash) {
  const std::vector<SphericalPoint> pts = {{0, 350, 1}, {0, 10, 1}};
  const auto poses = interpolate_trajectory(pts, 5, 1.0, Vec3::Zero());
  for (const auto& p : poses) {
    const double az = azimuth_deg(p);
    EXPECT_TRUE(az >= 350.0 - 1e-9 || az <= 10.0 + 1e-9) << az;
  }
}

TEST(Interpolation, UpVectorIsOrthogonalNearThePole) {
  const std::vector<SphericalPoint> pts = {{80, 0, 1}, {89.5, 30, 1}, {90, 60, 1}};
  const auto poses = interpolate_trajectory(pts, 20, 1.0, Vec3::Zero());
  for (const auto& p : poses) {
    const Vec3 fwd = (p.look_at - p.position).normalized();
    EXPECT_NEAR(p.up.norm(), 1.0, 1e-12);
    EXPECT_NEAR(p.up.dot(fwd), 0.0, 1e-9);
    EXPECT_TRUE(camera_to_world(p).allFinite());
  }
}

TEST(Trajectories, SmoothAndDeterministicForAllStrategies) {
  for (auto s : {Strategy::linear_drift, Strategy::sinusoidal, Strategy::circular_loop}) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto cfg = config(s, seed);
      const auto poses = generate_trajectory(cfg);
      const auto again = generate_trajectory(cfg);
      ASSERT_EQ(poses.size(), 60u);
      double max_step = 0.0, sum = 0.0;
      for (std::size_t f = 0; f < poses.size(); ++f) {
        ASSERT_EQ(poses[f].position, again[f].position);
        if (f == 0) continue;
        const Vec3 a = (poses[f - 1].position - cfg.center).normalized();
        const Vec3 b = (poses[f].position - cfg.center).normalized();
        const double step = std::atan2(a.cross(b).norm(), a.dot(b));
        max_step = std::max(max_step, step);
        sum += step;
      }
      const double mean = sum / (poses.size() - 1);
      EXPECT_LT(max_step / mean, 3.0) << to_string(s) << " seed " << seed;
    }
  }
}

TEST(CameraToWorld, OrthonormalAndLooksAtTarget) {
  const auto poses = sample_static_ring(6, 2.0, Vec3(1, 1, 1), 2);
  for (const auto& p : poses) {
    const Mat4 m = camera_to_world(p);
    const Eigen::Matrix3d R = m.block<3, 3>(0, 0);
    EXPECT_LT((R.transpose() * R - Eigen::Matrix3d::Identity()).norm(), 1e-12);
    EXPECT_NEAR(R.determinant(), 1.0, 1e-12);
    const Vec3 forward = -R.col(2);
    EXPECT_LT((forward - (p.look_at - p.position).normalized()).norm(), 1e-12);
  }
}

TEST(TrajectoryConfig, Validation) {
  auto cfg = config(Strategy::linear_drift, 1);
  cfg.n_frames = 1;
  EXPECT_THROW(generate_trajectory(cfg), Error);
  cfg = config(Strategy::linear_drift, 1);
  cfg.base_radius = 0.0;
  EXPECT_THROW(generate_trajectory(cfg), Error);
  EXPECT_THROW(parse_strategy("orbit"), Error);
}
