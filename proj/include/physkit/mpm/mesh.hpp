#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "physkit/binary_io.hpp"
#include "physkit/error.hpp"

namespace physkit::mpm {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;

  Vec3 triangle_vertex(std::size_t t, int k) const { return vertices[triangles[t][k]]; }
};

struct Aabb {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

  void extend(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  bool contains(const Vec3& p) const { return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all(); }
  double distance(const Vec3& p) const {
    const Vec3 d = (lo - p).cwiseMax(p - hi).cwiseMax(Vec3::Zero());
    return d.norm();
  }
};

inline Aabb bounds(const TriangleMesh& mesh) {
  Aabb box;
  for (const auto& v : mesh.vertices) box.extend(v);
  return box;
}

inline void transform(TriangleMesh& mesh, const Mat3& linear, const Vec3& offset) {
  for (auto& v : mesh.vertices) v = linear * v + offset;
}

/// Rejects meshes with no triangles, bad indices, non-finite vertices or zero-area faces.
inline void validate(const TriangleMesh& mesh) {
  if (mesh.triangles.empty()) throw Error(Errc::degenerate_mesh, "mesh has no triangles");
  for (const auto& v : mesh.vertices)
    if (!v.allFinite()) throw Error(Errc::degenerate_mesh, "non-finite vertex");
  const Aabb box = bounds(mesh);
  const double scale = (box.hi - box.lo).norm();
  for (const auto& t : mesh.triangles) {
    for (auto i : t)
      if (i >= mesh.vertices.size()) throw Error(Errc::degenerate_mesh, "triangle index out of range");
    const Vec3 n = (mesh.vertices[t[1]] - mesh.vertices[t[0]]).cross(mesh.vertices[t[2]] - mesh.vertices[t[0]]);
    if (n.norm() <= 1e-14 * scale * scale) throw Error(Errc::degenerate_mesh, "zero-area triangle");
  }
}

/// Axis-aligned box with outward-facing triangles.
inline TriangleMesh make_box_mesh(const Vec3& lo, const Vec3& hi) {
  TriangleMesh m;
  for (int i = 0; i < 8; ++i)
    m.vertices.emplace_back(i & 1 ? hi.x() : lo.x(), i & 2 ? hi.y() : lo.y(), i & 4 ? hi.z() : lo.z());
  m.triangles = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
                 {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
  return m;
}

/// Icosphere obtained by `subdivisions` rounds of midpoint refinement.
inline TriangleMesh make_sphere_mesh(const Vec3& center, double radius, int subdivisions = 3) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                         {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : v) p.normalize();
  std::vector<std::array<std::uint32_t, 3>> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                                 {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                                 {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                                 {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int level = 0; level < subdivisions; ++level) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoint;
    auto mid = [&](std::uint32_t a, std::uint32_t b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      const auto id = static_cast<std::uint32_t>(v.size() - 1);
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<std::array<std::uint32_t, 3>> next;
    next.reserve(f.size() * 4);
    for (const auto& tri : f) {
      const auto a = mid(tri[0], tri[1]), b = mid(tri[1], tri[2]), c = mid(tri[2], tri[0]);
      next.push_back({tri[0], a, c});
      next.push_back({tri[1], b, a});
      next.push_back({tri[2], c, b});
      next.push_back({a, b, c});
    }
    f = std::move(next);
  }
  TriangleMesh m;
  m.vertices.reserve(v.size());
  for (const auto& p : v) m.vertices.push_back(center + radius * p);
  m.triangles = std::move(f);
  return m;
}

namespace detail {

struct VertexWelder {
  std::map<std::array<double, 3>, std::uint32_t> index;
  TriangleMesh* mesh;

  std::uint32_t add(const Vec3& p) {
    const std::array<double, 3> key{p.x(), p.y(), p.z()};
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    mesh->vertices.push_back(p);
    const auto id = static_cast<std::uint32_t>(mesh->vertices.size() - 1);
    index.emplace(key, id);
    return id;
  }
};

inline TriangleMesh read_stl_binary(std::istream& in) {
  char header[80];
  in.read(header, 80);
  const auto count = binio::read<std::uint32_t>(in, "STL triangle count");
  TriangleMesh mesh;
  VertexWelder weld{{}, &mesh};
  for (std::uint32_t t = 0; t < count; ++t) {
    binio::read<float>(in, "STL normal");
    binio::read<float>(in, "STL normal");
    binio::read<float>(in, "STL normal");
    std::array<std::uint32_t, 3> tri{};
    for (int k = 0; k < 3; ++k) {
      Vec3 p;
      for (int a = 0; a < 3; ++a) p[a] = binio::read<float>(in, "STL vertex");
      tri[k] = weld.add(p);
    }
    binio::read<std::uint16_t>(in, "STL attribute");
    mesh.triangles.push_back(tri);
  }
  return mesh;
}

inline TriangleMesh read_stl_ascii(std::istream& in) {
  TriangleMesh mesh;
  VertexWelder weld{{}, &mesh};
  std::string token;
  std::vector<std::uint32_t> pending;
  while (in >> token) {
    if (token != "vertex") continue;
    Vec3 p;
    if (!(in >> p.x() >> p.y() >> p.z())) throw Error(Errc::malformed_header, "bad STL vertex line");
    pending.push_back(weld.add(p));
    if (pending.size() == 3) {
      mesh.triangles.push_back({pending[0], pending[1], pending[2]});
      pending.clear();
    }
  }
  if (!pending.empty()) throw Error(Errc::malformed_header, "STL facet with fewer than three vertices");
  return mesh;
}

}  // namespace detail

/// Reads ASCII or binary STL. Coincident vertices are merged.
inline TriangleMesh load_stl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_failure, "cannot open " + path.string());
  const auto size = std::filesystem::file_size(path);
  char head[6] = {};
  in.read(head, 5);
  in.seekg(0);
  bool binary = std::string(head, 5) != "solid";
  if (!binary && size >= 84) {
    // Some binary files start with "solid" too; trust the size field when it matches.
    in.seekg(80);
    const auto count = binio::read<std::uint32_t>(in, "STL triangle count");
    binary = 84 + 50ull * count == size;
    in.seekg(0);
  }
  auto mesh = binary ? detail::read_stl_binary(in) : detail::read_stl_ascii(in);
  validate(mesh);
  return mesh;
}

inline void save_stl(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_failure, "cannot write " + path.string());
  const std::string header(80, ' ');
  out.write(header.data(), 80);
  binio::write<std::uint32_t>(out, static_cast<std::uint32_t>(mesh.triangles.size()));
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Vec3 a = mesh.triangle_vertex(t, 0), b = mesh.triangle_vertex(t, 1), c = mesh.triangle_vertex(t, 2);
    const Vec3 n = (b - a).cross(c - a).normalized();
    for (const Vec3& p : {n, a, b, c})
      for (int k = 0; k < 3; ++k) binio::write<float>(out, static_cast<float>(p[k]));
    binio::write<std::uint16_t>(out, 0);
  }
  if (!out) throw Error(Errc::io_failure, "write failed for " + path.string());
}

/// Reads an OFF file; polygons with more than three vertices are fan-triangulated.
inline TriangleMesh load_off(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) throw Error(Errc::io_failure, "cannot open " + path.string());
  std::stringstream in;
  for (std::string line; std::getline(file, line);) {
    const auto hash = line.find('#');
    in << line.substr(0, hash) << '\n';
  }
  std::string magic;
  in >> magic;
  if (magic != "OFF") throw Error(Errc::malformed_header, path.string() + " is not an OFF file");
  std::size_t nv = 0, nf = 0, ne = 0;
  if (!(in >> nv >> nf >> ne)) throw Error(Errc::malformed_header, "bad OFF counts");
  TriangleMesh mesh;
  mesh.vertices.resize(nv);
  for (auto& v : mesh.vertices)
    if (!(in >> v.x() >> v.y() >> v.z())) throw Error(Errc::malformed_header, "truncated OFF vertices");
  for (std::size_t f = 0; f < nf; ++f) {
    std::size_t k = 0;
    if (!(in >> k) || k < 3) throw Error(Errc::malformed_header, "bad OFF face");
    std::vector<std::uint32_t> idx(k);
    for (auto& i : idx)
      if (!(in >> i)) throw Error(Errc::malformed_header, "truncated OFF face");
    for (std::size_t j = 1; j + 1 < k; ++j) mesh.triangles.push_back({idx[0], idx[j], idx[j + 1]});
  }
  validate(mesh);
  return mesh;
}

inline TriangleMesh load_mesh(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".stl") return load_stl(path);
  if (ext == ".off") return load_off(path);
  throw Error(Errc::io_failure, "unsupported mesh format " + ext);
}

/// Closest-point distance from p to triangle (a, b, c).
inline double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return ap.norm();
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return bp.norm();
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return (p - (a + d1 / (d1 - d3) * ab)).norm();
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return cp.norm();
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return (p - (a + d2 / (d2 - d6) * ac)).norm();
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && d4 - d3 >= 0.0 && d5 - d6 >= 0.0)
    return (p - (b + (d4 - d3) / ((d4 - d3) + (d5 - d6)) * (c - b))).norm();
  const double denom = 1.0 / (va + vb + vc);
  return (p - (a + ab * (vb * denom) + ac * (vc * denom))).norm();
}

/// Moller-Trumbore; counts hits with t > 0.
inline bool ray_hits_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 e1 = b - a, e2 = c - a;
  const Vec3 pv = dir.cross(e2);
  const double det = e1.dot(pv);
  if (std::abs(det) < 1e-300) return false;
  const double inv = 1.0 / det;
  const Vec3 tv = origin - a;
  const double u = tv.dot(pv) * inv;
  if (u < 0.0 || u > 1.0) return false;
  const Vec3 qv = tv.cross(e1);
  const double v = dir.dot(qv) * inv;
  if (v < 0.0 || u + v > 1.0) return false;
  return e2.dot(qv) * inv > 0.0;
}

/// Ray directions slightly tilted off the axes so rays avoid mesh edges of axis-aligned geometry.
inline const std::array<Vec3, 3>& parity_directions() {
  static const std::array<Vec3, 3> dirs = {
      Vec3(1.0, 1e-4 * std::sqrt(2.0), 1e-4 * std::sqrt(3.0)).normalized(),
      Vec3(1e-4 * std::sqrt(5.0), 1.0, 1e-4 * std::sqrt(7.0)).normalized(),
      Vec3(1e-4 * std::sqrt(11.0), 1e-4 * std::sqrt(13.0), 1.0).normalized()};
  return dirs;
}

struct ParityVote {
  bool inside = false;
  bool consistent = true;
};

inline ParityVote parity_inside(const TriangleMesh& mesh, const Vec3& p) {
  int votes = 0;
  std::array<bool, 3> odd{};
  for (int r = 0; r < 3; ++r) {
    int hits = 0;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
      hits += ray_hits_triangle(p, parity_directions()[r], mesh.triangle_vertex(t, 0), mesh.triangle_vertex(t, 1),
                                mesh.triangle_vertex(t, 2));
    odd[r] = hits % 2 == 1;
    votes += odd[r];
  }
  return {votes >= 2, odd[0] == odd[1] && odd[1] == odd[2]};
}

inline bool mesh_contains(const TriangleMesh& mesh, const Vec3& p) { return parity_inside(mesh, p).inside; }

inline double unsigned_distance(const TriangleMesh& mesh, const Vec3& p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
    best = std::min(best, point_triangle_distance(p, mesh.triangle_vertex(t, 0), mesh.triangle_vertex(t, 1),
                                                  mesh.triangle_vertex(t, 2)));
  return best;
}

}  // namespace physkit::mpm
