#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <variant>

#include "physkit/constitutive/material.hpp"

namespace physkit::constitutive {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

inline constexpr int spatial_dim = 3;

struct DeformationState {
  Mat3 F = Mat3::Identity();
  double J = 1.0;
  std::optional<Mat3> velocity_gradient;

  DeformationState() = default;
  explicit DeformationState(const Mat3& f, std::optional<Mat3> grad_v = std::nullopt)
      : F(f), J(f.determinant()), velocity_gradient(std::move(grad_v)) {}
};

/// Proper SVD F = U diag(sigma) V^T plus the Hencky (log) strain of sigma.
/// det(U) = det(V) = +1; a reflection would show up as a negative smallest
/// singular value, which is rejected since admissible F has det > 0.
struct HenckyStrain {
  Mat3 U;
  Vec3 sigma;
  Mat3 V;
  Vec3 eps;      // log(sigma)
  Vec3 eps_hat;  // deviatoric part eps - tr(eps)/3
  double trace = 0.0;

  Mat3 eps_matrix() const { return eps.asDiagonal(); }
  Mat3 eps_hat_matrix() const { return eps_hat.asDiagonal(); }
  double eps_hat_norm() const { return eps_hat.norm(); }
};

inline HenckyStrain hencky_strain(const Mat3& F) {
  const double det = F.determinant();
  if (!(det > 0.0)) throw Error(Errc::singular_f, "det(F) = " + std::to_string(det) + " is not positive");
  Eigen::JacobiSVD<Mat3> svd(F, Eigen::ComputeFullU | Eigen::ComputeFullV);
  HenckyStrain h;
  h.U = svd.matrixU();
  h.V = svd.matrixV();
  h.sigma = svd.singularValues();
  if (h.U.determinant() < 0.0) {
    h.U.col(2) *= -1.0;
    h.sigma(2) *= -1.0;
  }
  if (h.V.determinant() < 0.0) {
    h.V.col(2) *= -1.0;
    h.sigma(2) *= -1.0;
  }
  if (!h.sigma.allFinite() || !(h.sigma.minCoeff() > 0.0))
    throw Error(Errc::svd_failure, "SVD produced non-positive or non-finite singular values");
  h.eps = h.sigma.array().log().matrix();
  h.trace = h.eps.sum();
  h.eps_hat = h.eps.array() - h.trace / spatial_dim;
  return h;
}

/// U exp(diag(e)) V^T.
inline Mat3 compose(const HenckyStrain& h, const Vec3& log_sigma) {
  return h.U * log_sigma.array().exp().matrix().asDiagonal() * h.V.transpose();
}

namespace detail {

// StVK in Hencky strain: U (2 mu eps + lambda tr(eps) I) U^T.
inline Mat3 hencky_kirchhoff(const HenckyStrain& h, double mu, double lambda) {
  const Vec3 diag = (2.0 * mu * h.eps.array() + lambda * h.trace).matrix();
  return h.U * diag.asDiagonal() * h.U.transpose();
}

inline Mat3 neo_hookean_kirchhoff(const Mat3& F, double J, double mu, double lambda) {
  return mu * (F * F.transpose()) + (lambda * std::log(J) - mu) * Mat3::Identity();
}

inline Mat3 newtonian_kirchhoff(const NewtonianFluid& m, double J, const Mat3& grad_v) {
  return 0.5 * m.viscosity * (grad_v + grad_v.transpose()) +
         m.bulk_modulus * (J - std::pow(J, -6.0)) * Mat3::Identity();
}

struct Projection {
  bool yielded = false;
  Vec3 log_sigma;  // projected Hencky strain (only meaningful if yielded)
};

inline Projection project_plasticine(const Plasticine& m, const HenckyStrain& h) {
  const double norm = h.eps_hat_norm();
  const double delta_gamma = norm - m.yield_stress / (2.0 * m.lame.mu);
  if (delta_gamma <= 0.0) return {};
  return {true, h.eps - delta_gamma * h.eps_hat / norm};
}

inline double nonnewtonian_mu_hat(const NonNewtonianFluid& m, const HenckyStrain& h) {
  return m.shear_modulus * h.sigma.squaredNorm() / spatial_dim;
}

inline Projection project_nonnewtonian(const NonNewtonianFluid& m, const HenckyStrain& h, double dt) {
  const double mu = m.shear_modulus;
  const double eps_hat_norm = h.eps_hat_norm();
  const double s_norm = 2.0 * mu * eps_hat_norm;
  const double delta_gamma = m.yield_mode == NonNewtonianYield::stress_space
                                 ? s_norm - m.yield_stress
                                 : eps_hat_norm - m.yield_stress / (2.0 * mu);
  if (delta_gamma <= 0.0) return {};
  const double relax = 1.0 + m.plastic_viscosity / (2.0 * nonnewtonian_mu_hat(m, h) * dt);
  const double s_hat = s_norm - delta_gamma / relax;
  const Vec3 direction = m.yield_mode == NonNewtonianYield::stress_space ? Vec3(h.eps_hat / eps_hat_norm)
                                                                        : h.eps_hat;
  return {true, (s_hat / (2.0 * mu) * direction.array() + h.trace / spatial_dim).matrix()};
}

inline double granular_delta_gamma(const Granular& m, const HenckyStrain& h) {
  const double mu = m.lame.mu, lambda = m.lame.lambda;
  return h.eps_hat_norm() + m.alpha * (spatial_dim * lambda + 2.0 * mu) * h.trace / (2.0 * mu);
}

}  // namespace detail

/// Kirchhoff-style stress J T(F) for the given model.
inline Mat3 cauchy_stress(const MaterialModel& m, const DeformationState& d, double dt = 0.0) {
  (void)dt;
  if (!(d.J > 0.0)) throw Error(Errc::non_positive_j, "J = " + std::to_string(d.J));
  return std::visit(
      [&](const auto& mat) -> Mat3 {
        using T = std::decay_t<decltype(mat)>;
        if constexpr (std::is_same_v<T, ElasticSolid>) {
          return detail::neo_hookean_kirchhoff(d.F, d.J, mat.lame.mu, mat.lame.lambda);
        } else if constexpr (std::is_same_v<T, NewtonianFluid>) {
          if (!d.velocity_gradient)
            throw Error(Errc::missing_velocity_gradient, "Newtonian stress needs the velocity gradient");
          return detail::newtonian_kirchhoff(mat, d.J, *d.velocity_gradient);
        } else if constexpr (std::is_same_v<T, NonNewtonianFluid>) {
          return detail::hencky_kirchhoff(hencky_strain(d.F), mat.shear_modulus, mat.lambda());
        } else {
          return detail::hencky_kirchhoff(hencky_strain(d.F), mat.lame.mu, mat.lame.lambda);
        }
      },
      m);
}

/// Plastic return mapping Z(F). Elastic solids and Newtonian fluids have no
/// yield surface and return F unchanged.
inline Mat3 return_map(const MaterialModel& m, const Mat3& F, double dt) {
  return std::visit(
      [&](const auto& mat) -> Mat3 {
        using T = std::decay_t<decltype(mat)>;
        if constexpr (std::is_same_v<T, ElasticSolid> || std::is_same_v<T, NewtonianFluid>) {
          if (!(F.determinant() > 0.0)) throw Error(Errc::singular_f, "det(F) is not positive");
          return F;
        } else if constexpr (std::is_same_v<T, Plasticine>) {
          const auto h = hencky_strain(F);
          const auto p = detail::project_plasticine(mat, h);
          return p.yielded ? compose(h, p.log_sigma) : F;
        } else if constexpr (std::is_same_v<T, NonNewtonianFluid>) {
          const auto h = hencky_strain(F);
          const auto p = detail::project_nonnewtonian(mat, h, dt);
          return p.yielded ? compose(h, p.log_sigma) : F;
        } else {
          const auto h = hencky_strain(F);
          if (h.trace > 0.0) return h.U * h.V.transpose();
          const double delta_gamma = detail::granular_delta_gamma(mat, h);
          const double norm = h.eps_hat_norm();
          if (delta_gamma <= 0.0 || norm < 1e-12) return F;
          return compose(h, h.eps - delta_gamma * h.eps_hat / norm);
        }
      },
      m);
}

/// Yield measure of the model at F: positive means the state violates the
/// yield condition. For granular media it is max(tr eps, delta_gamma); for
/// the viscoplastic fluid it is delta_gamma expressed in strain units.
inline double yield_measure(const MaterialModel& m, const Mat3& F) {
  return std::visit(
      [&](const auto& mat) -> double {
        using T = std::decay_t<decltype(mat)>;
        if constexpr (std::is_same_v<T, ElasticSolid> || std::is_same_v<T, NewtonianFluid>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, Plasticine>) {
          return hencky_strain(F).eps_hat_norm() - mat.yield_stress / (2.0 * mat.lame.mu);
        } else if constexpr (std::is_same_v<T, NonNewtonianFluid>) {
          return hencky_strain(F).eps_hat_norm() - mat.yield_stress / (2.0 * mat.shear_modulus);
        } else {
          const auto h = hencky_strain(F);
          return std::max(h.trace, detail::granular_delta_gamma(mat, h));
        }
      },
      m);
}

/// Result of one particle's constitutive update inside an MPM substep.
struct ConstitutiveUpdate {
  Mat3 F;
  Mat3 kirchhoff;  // J T evaluated at the projected F
};

/// Projection first, stress second, sharing one SVD where the model allows.
/// `velocity_gradient` is only read by the Newtonian model.
inline ConstitutiveUpdate project_and_stress(const MaterialModel& m, const Mat3& F_trial,
                                             const Mat3& velocity_gradient, double dt) {
  return std::visit(
      [&](const auto& mat) -> ConstitutiveUpdate {
        using T = std::decay_t<decltype(mat)>;
        const double J = F_trial.determinant();
        if constexpr (std::is_same_v<T, ElasticSolid>) {
          if (!(J > 0.0)) throw Error(Errc::non_positive_j, "J = " + std::to_string(J));
          return {F_trial, detail::neo_hookean_kirchhoff(F_trial, J, mat.lame.mu, mat.lame.lambda)};
        } else if constexpr (std::is_same_v<T, NewtonianFluid>) {
          if (!(J > 0.0)) throw Error(Errc::non_positive_j, "J = " + std::to_string(J));
          return {F_trial, detail::newtonian_kirchhoff(mat, J, velocity_gradient)};
        } else if constexpr (std::is_same_v<T, Plasticine> || std::is_same_v<T, NonNewtonianFluid>) {
          auto h = hencky_strain(F_trial);
          detail::Projection p;
          if constexpr (std::is_same_v<T, Plasticine>)
            p = detail::project_plasticine(mat, h);
          else
            p = detail::project_nonnewtonian(mat, h, dt);
          Mat3 F = F_trial;
          if (p.yielded) {
            F = compose(h, p.log_sigma);
            h.eps = p.log_sigma;
            h.sigma = p.log_sigma.array().exp().matrix();
            h.trace = h.eps.sum();
            h.eps_hat = h.eps.array() - h.trace / spatial_dim;
          }
          if constexpr (std::is_same_v<T, Plasticine>)
            return {F, detail::hencky_kirchhoff(h, mat.lame.mu, mat.lame.lambda)};
          else
            return {F, detail::hencky_kirchhoff(h, mat.shear_modulus, mat.lambda())};
        } else {
          auto h = hencky_strain(F_trial);
          Vec3 log_sigma = h.eps;
          bool changed = false;
          if (h.trace > 0.0) {
            log_sigma.setZero();
            changed = true;
          } else {
            const double delta_gamma = detail::granular_delta_gamma(mat, h);
            const double norm = h.eps_hat_norm();
            if (delta_gamma > 0.0 && norm >= 1e-12) {
              log_sigma = h.eps - delta_gamma * h.eps_hat / norm;
              changed = true;
            }
          }
          Mat3 F = F_trial;
          if (changed) {
            F = compose(h, log_sigma);
            h.eps = log_sigma;
            h.trace = log_sigma.sum();
            h.eps_hat = log_sigma.array() - h.trace / spatial_dim;
          }
          return {F, detail::hencky_kirchhoff(h, mat.lame.mu, mat.lame.lambda)};
        }
      },
      m);
}

}  // namespace physkit::constitutive
