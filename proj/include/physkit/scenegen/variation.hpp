#pragma once

#include <string>
#include <vector>

#include "physkit/random.hpp"
#include "physkit/scenegen/scene.hpp"

namespace physkit::scenegen {

namespace detail {

inline double draw(Rng& rng, Range r) { return rng.uniform(r.lo, r.hi); }

inline void resample(MaterialSpec& m, Rng& rng) {
  namespace c = constitutive;
  auto& s = m.surface;
  double a = draw(rng, ranges::friction), b = draw(rng, ranges::friction);
  s.dynamic_friction = std::min(a, b);
  s.static_friction = std::max(a, b);
  s.restitution = draw(rng, ranges::restitution);
  s.density = draw(rng, ranges::density);
  if (m.sph) {
    m.sph->viscosity = draw(rng, ranges::sph_viscosity);
    m.sph->surface_tension = draw(rng, ranges::sph_surface_tension);
  }
  if (!m.model) return;
  std::visit(
      [&](auto& mat) {
        using T = std::decay_t<decltype(mat)>;
        if constexpr (std::is_same_v<T, c::Plasticine>) {
          mat.yield_stress = draw(rng, ranges::yield_stress);
        } else if constexpr (std::is_same_v<T, c::NewtonianFluid>) {
          mat.viscosity = draw(rng, ranges::fluid_viscosity);
        } else if constexpr (std::is_same_v<T, c::NonNewtonianFluid>) {
          mat.yield_stress = draw(rng, ranges::yield_stress);
          mat.plastic_viscosity = draw(rng, ranges::plastic_viscosity);
        } else if constexpr (std::is_same_v<T, c::Granular>) {
          mat = c::make_granular(mat.lame, draw(rng, ranges::friction_angle));
        }
      },
      *m.model);
}

}  // namespace detail

/// Copies of `spec` whose material parameters are redrawn uniformly within the
/// published ranges. Static friction is kept >= dynamic friction. Geometry,
/// activity and elastic moduli are untouched.
inline std::vector<SceneSpec> vary_materials(const SceneSpec& spec, int n_variants, std::uint64_t seed) {
  std::vector<SceneSpec> out;
  if (n_variants <= 0) return out;
  Rng root(seed);
  out.reserve(static_cast<std::size_t>(n_variants));
  for (int k = 0; k < n_variants; ++k) {
    Rng rng = root.fork(static_cast<std::uint64_t>(k));
    SceneSpec v = spec;
    v.id = spec.id + "_v" + std::to_string(k);
    for (auto& m : v.materials) {
      detail::resample(m, rng);
      m.allow_out_of_range = false;
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace physkit::scenegen
