#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace physkit {

enum class Errc {
  malformed_header,
  dimension_mismatch,
  non_finite_data,
  value_out_of_range,
  empty_tensor,
  io_failure,
  invalid_lambda,
  zero_energy,
  invalid_config,
  invalid_poisson,
  invalid_angle,
  invalid_material,
  non_positive_j,
  missing_velocity_gradient,
  singular_f,
  svd_failure,
  particle_out_of_domain,
  numerical_instability,
  non_watertight,
  degenerate_mesh,
  pole_singularity,
  non_incident,
  zero_density,
  too_few_points,
  infeasible,
  invalid_scene,
};

constexpr std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::malformed_header: return "MalformedHeader";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::non_finite_data: return "NonFiniteData";
    case Errc::value_out_of_range: return "ValueOutOfRange";
    case Errc::empty_tensor: return "EmptyTensor";
    case Errc::io_failure: return "IoFailure";
    case Errc::invalid_lambda: return "InvalidLambda";
    case Errc::zero_energy: return "ZeroEnergy";
    case Errc::invalid_config: return "InvalidConfig";
    case Errc::invalid_poisson: return "InvalidPoisson";
    case Errc::invalid_angle: return "InvalidAngle";
    case Errc::invalid_material: return "InvalidMaterial";
    case Errc::non_positive_j: return "NonPositiveJ";
    case Errc::missing_velocity_gradient: return "MissingVelocityGradient";
    case Errc::singular_f: return "SingularF";
    case Errc::svd_failure: return "SvdFailure";
    case Errc::particle_out_of_domain: return "ParticleOutOfDomain";
    case Errc::numerical_instability: return "NumericalInstability";
    case Errc::non_watertight: return "NonWatertight";
    case Errc::degenerate_mesh: return "DegenerateMesh";
    case Errc::pole_singularity: return "PoleSingularity";
    case Errc::non_incident: return "NonIncident";
    case Errc::zero_density: return "ZeroDensity";
    case Errc::too_few_points: return "TooFewPoints";
    case Errc::infeasible: return "Infeasible";
    case Errc::invalid_scene: return "InvalidScene";
  }
  return "Unknown";
}

/// Every failure in the library surfaces as this exception; `code()` lets
/// callers (the CLI in particular) map failures onto stable exit codes.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace physkit
