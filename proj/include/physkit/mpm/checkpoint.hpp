#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "physkit/binary_io.hpp"
#include "physkit/error.hpp"
#include "physkit/mpm/particles.hpp"

namespace physkit::mpm {

// PIOS layout: "PIOS", u32 version, u64 particle count, u32 field count,
// then per field {u8 name length, name, u32 components}, then one float32
// array per field in table order (particle-major within a field).

inline constexpr std::uint32_t pios_version = 1;

struct CheckpointField {
  std::string name;
  std::uint32_t components;
};

inline const std::vector<CheckpointField>& checkpoint_fields() {
  static const std::vector<CheckpointField> fields = {{"position", 3}, {"velocity", 3}, {"mass", 1},
                                                      {"volume0", 1},  {"F", 9},        {"C", 9},
                                                      {"material_id", 1}, {"object_id", 1}};
  return fields;
}

inline void write_checkpoint(std::ostream& out, const ParticleSet& p) {
  binio::write_magic(out, "PIOS");
  binio::write<std::uint32_t>(out, pios_version);
  binio::write<std::uint64_t>(out, p.size());
  const auto& fields = checkpoint_fields();
  binio::write<std::uint32_t>(out, static_cast<std::uint32_t>(fields.size()));
  for (const auto& f : fields) {
    binio::write<std::uint8_t>(out, static_cast<std::uint8_t>(f.name.size()));
    out.write(f.name.data(), static_cast<std::streamsize>(f.name.size()));
    binio::write<std::uint32_t>(out, f.components);
  }
  auto put = [&](double x) { binio::write<float>(out, static_cast<float>(x)); };
  for (const auto& v : p.x) for (int a = 0; a < 3; ++a) put(v[a]);
  for (const auto& v : p.v) for (int a = 0; a < 3; ++a) put(v[a]);
  for (double m : p.mass) put(m);
  for (double m : p.volume0) put(m);
  for (const auto& M : p.F) for (int r = 0; r < 3; ++r) for (int c = 0; c < 3; ++c) put(M(r, c));
  for (const auto& M : p.C) for (int r = 0; r < 3; ++r) for (int c = 0; c < 3; ++c) put(M(r, c));
  for (auto id : p.material_id) put(id);
  for (auto id : p.object_id) put(id);
}

inline void save_checkpoint(const std::filesystem::path& path, const ParticleSet& p) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_failure, "cannot write " + path.string());
  write_checkpoint(out, p);
  out.flush();
  if (!out) throw Error(Errc::io_failure, "write failed for " + path.string());
}

inline ParticleSet load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_failure, "cannot open " + path.string());
  binio::expect_magic(in, "PIOS");
  const auto version = binio::read<std::uint32_t>(in, "PIOS version");
  if (version != pios_version) throw Error(Errc::malformed_header, "unsupported PIOS version " + std::to_string(version));
  const auto n = binio::read<std::uint64_t>(in, "PIOS particle count");
  const auto nfields = binio::read<std::uint32_t>(in, "PIOS field count");
  const auto& expected = checkpoint_fields();
  if (nfields != expected.size()) throw Error(Errc::malformed_header, "unexpected PIOS field table");
  for (const auto& f : expected) {
    const auto len = binio::read<std::uint8_t>(in, "PIOS field name");
    std::string name(len, '\0');
    in.read(name.data(), len);
    const auto comps = binio::read<std::uint32_t>(in, "PIOS field components");
    if (!in || name != f.name || comps != f.components)
      throw Error(Errc::malformed_header, "unexpected PIOS field '" + name + "'");
  }
  auto get = [&] { return static_cast<double>(binio::read<float>(in, "PIOS payload")); };
  ParticleSet p;
  p.x.resize(n);
  p.v.resize(n);
  p.mass.resize(n);
  p.volume0.resize(n);
  p.F.resize(n);
  p.C.resize(n);
  p.material_id.resize(n);
  p.object_id.resize(n);
  for (auto& v : p.x) for (int a = 0; a < 3; ++a) v[a] = get();
  for (auto& v : p.v) for (int a = 0; a < 3; ++a) v[a] = get();
  for (auto& m : p.mass) m = get();
  for (auto& m : p.volume0) m = get();
  for (auto& M : p.F) for (int r = 0; r < 3; ++r) for (int c = 0; c < 3; ++c) M(r, c) = get();
  for (auto& M : p.C) for (int r = 0; r < 3; ++r) for (int c = 0; c < 3; ++c) M(r, c) = get();
  for (auto& id : p.material_id) id = static_cast<std::uint32_t>(get());
  for (auto& id : p.object_id) id = static_cast<std::uint32_t>(get());
  return p;
}

}  // namespace physkit::mpm
