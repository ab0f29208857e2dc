#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <variant>

#include "physkit/error.hpp"

namespace physkit::constitutive {

struct LameParameters {
  double youngs_modulus = 0.0;
  double poisson_ratio = 0.0;
  double mu = 0.0;
  double lambda = 0.0;
};

/// mu = E / (2(1 + nu)), lambda = nu E / ((1 + nu)(1 - 2 nu)).
inline LameParameters lame_from_modulus(double E, double nu) {
  if (!(E > 0.0) || !std::isfinite(E))
    throw Error(Errc::invalid_material, "Young's modulus must be positive, got " + std::to_string(E));
  if (!(nu > -1.0 && nu < 0.5))
    throw Error(Errc::invalid_poisson, "Poisson ratio must lie in (-1, 0.5), got " + std::to_string(nu));
  return {E, nu, E / (2.0 * (1.0 + nu)), nu * E / ((1.0 + nu) * (1.0 - 2.0 * nu))};
}

/// Drucker-Prager friction coefficient alpha = sqrt(2/3) 2 sin(theta) / (3 - sin(theta)).
inline double drucker_prager_alpha(double friction_angle_deg) {
  if (!(friction_angle_deg > 0.0 && friction_angle_deg < 90.0))
    throw Error(Errc::invalid_angle,
                "friction angle must lie in (0, 90) degrees, got " + std::to_string(friction_angle_deg));
  const double s = std::sin(friction_angle_deg * std::numbers::pi / 180.0);
  return std::sqrt(2.0 / 3.0) * 2.0 * s / (3.0 - s);
}

struct ElasticSolid {
  LameParameters lame;
};

struct Plasticine {
  LameParameters lame;
  double yield_stress = 0.0;
};

struct NewtonianFluid {
  double viscosity = 0.0;
  double bulk_modulus = 0.0;
};

/// Selects how the viscoplastic return map measures yield.
///   stress_space: delta_gamma = ||s|| - tau_Y, flow along eps_hat / ||eps_hat||.
///   strain_space: delta_gamma = ||eps_hat|| - tau_Y / (2 mu) and the exponent
///                 (s_hat / 2mu) eps_hat taken literally. Kept for comparison;
///                 it does not reduce to the plasticine map at eta = 0.
enum class NonNewtonianYield { stress_space, strain_space };

struct NonNewtonianFluid {
  double shear_modulus = 0.0;
  double bulk_modulus = 0.0;
  double yield_stress = 0.0;
  double plastic_viscosity = 0.0;
  NonNewtonianYield yield_mode = NonNewtonianYield::stress_space;

  /// Second Lame parameter implied by the shear and bulk moduli.
  double lambda() const { return bulk_modulus - 2.0 * shear_modulus / 3.0; }
};

struct Granular {
  LameParameters lame;
  double friction_angle = 0.0;  // degrees
  double alpha = 0.0;
};

inline Granular make_granular(LameParameters lame, double friction_angle_deg) {
  return {lame, friction_angle_deg, drucker_prager_alpha(friction_angle_deg)};
}

using MaterialModel = std::variant<ElasticSolid, Plasticine, NewtonianFluid, NonNewtonianFluid, Granular>;

inline std::string model_name(const MaterialModel& m) {
  struct {
    std::string operator()(const ElasticSolid&) const { return "elastic"; }
    std::string operator()(const Plasticine&) const { return "plasticine"; }
    std::string operator()(const NewtonianFluid&) const { return "newtonian"; }
    std::string operator()(const NonNewtonianFluid&) const { return "non_newtonian"; }
    std::string operator()(const Granular&) const { return "granular"; }
  } visitor;
  return std::visit(visitor, m);
}

inline bool is_fluid(const MaterialModel& m) {
  return std::holds_alternative<NewtonianFluid>(m) || std::holds_alternative<NonNewtonianFluid>(m);
}

namespace detail {
inline void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw Error(Errc::invalid_material, std::string(what) + " must be positive, got " + std::to_string(x));
}
inline void validate_lame(const LameParameters& l) {
  const auto ref = lame_from_modulus(l.youngs_modulus, l.poisson_ratio);
  if (std::abs(ref.mu - l.mu) > 1e-9 * ref.mu ||
      std::abs(ref.lambda - l.lambda) > 1e-9 * std::max(1.0, std::abs(ref.lambda)))
    throw Error(Errc::invalid_material, "Lame parameters inconsistent with E and nu");
}
}  // namespace detail

inline void validate(const MaterialModel& m) {
  std::visit(
      [](const auto& mat) {
        using T = std::decay_t<decltype(mat)>;
        if constexpr (std::is_same_v<T, ElasticSolid>) {
          detail::validate_lame(mat.lame);
        } else if constexpr (std::is_same_v<T, Plasticine>) {
          detail::validate_lame(mat.lame);
          if (!(mat.yield_stress >= 0.0)) throw Error(Errc::invalid_material, "yield stress must be >= 0");
        } else if constexpr (std::is_same_v<T, NewtonianFluid>) {
          detail::require_positive(mat.viscosity, "viscosity");
          detail::require_positive(mat.bulk_modulus, "bulk modulus");
        } else if constexpr (std::is_same_v<T, NonNewtonianFluid>) {
          detail::require_positive(mat.shear_modulus, "shear modulus");
          detail::require_positive(mat.bulk_modulus, "bulk modulus");
          detail::require_positive(mat.plastic_viscosity, "plastic viscosity");
          if (!(mat.yield_stress >= 0.0)) throw Error(Errc::invalid_material, "yield stress must be >= 0");
        } else {
          detail::validate_lame(mat.lame);
          const double a = drucker_prager_alpha(mat.friction_angle);
          if (std::abs(a - mat.alpha) > 1e-12)
            throw Error(Errc::invalid_material, "alpha inconsistent with friction angle");
        }
      },
      m);
}

}  // namespace physkit::constitutive
