#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "physkit/error.hpp"

namespace physkit::mpm {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Structure-of-arrays particle state.
struct ParticleSet {
  std::vector<Vec3> x;
  std::vector<Vec3> v;
  std::vector<double> mass;
  std::vector<double> volume0;
  std::vector<Mat3> F;
  std::vector<Mat3> C;
  std::vector<std::uint32_t> material_id;
  std::vector<std::uint32_t> object_id;

  std::size_t size() const { return x.size(); }
  bool empty() const { return x.empty(); }

  void reserve(std::size_t n) {
    x.reserve(n);
    v.reserve(n);
    mass.reserve(n);
    volume0.reserve(n);
    F.reserve(n);
    C.reserve(n);
    material_id.reserve(n);
    object_id.reserve(n);
  }

  std::size_t add(const Vec3& position, const Vec3& velocity, double m, double vol, std::uint32_t material,
                  std::uint32_t object = 1) {
    if (!(m > 0.0)) throw Error(Errc::invalid_config, "particle mass must be positive");
    if (!(vol > 0.0)) throw Error(Errc::invalid_config, "particle volume must be positive");
    x.push_back(position);
    v.push_back(velocity);
    mass.push_back(m);
    volume0.push_back(vol);
    F.push_back(Mat3::Identity());
    C.push_back(Mat3::Zero());
    material_id.push_back(material);
    object_id.push_back(object);
    return x.size() - 1;
  }

  void append(const ParticleSet& other) {
    x.insert(x.end(), other.x.begin(), other.x.end());
    v.insert(v.end(), other.v.begin(), other.v.end());
    mass.insert(mass.end(), other.mass.begin(), other.mass.end());
    volume0.insert(volume0.end(), other.volume0.begin(), other.volume0.end());
    F.insert(F.end(), other.F.begin(), other.F.end());
    C.insert(C.end(), other.C.begin(), other.C.end());
    material_id.insert(material_id.end(), other.material_id.begin(), other.material_id.end());
    object_id.insert(object_id.end(), other.object_id.begin(), other.object_id.end());
  }
};

inline double total_mass(const ParticleSet& p) {
  double m = 0.0;
  for (double mi : p.mass) m += mi;
  return m;
}

inline Vec3 total_momentum(const ParticleSet& p) {
  Vec3 s = Vec3::Zero();
  for (std::size_t i = 0; i < p.size(); ++i) s += p.mass[i] * p.v[i];
  return s;
}

inline double max_speed(const ParticleSet& p) {
  double s = 0.0;
  for (const auto& v : p.v) s = std::max(s, v.norm());
  return s;
}

}  // namespace physkit::mpm
