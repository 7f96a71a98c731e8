#pragma once

#include "sal/dynamics.hpp"
#include "sal/spectral.hpp"

#include <Eigen/Dense>

namespace sal {

/// Token coefficients in the eigenbasis: row i holds c_i with x_i = sum_k c_ik e_k.
struct ModalCoordinates {
  Eigen::MatrixXd coeffs;
  Spectrum spectrum;

  [[nodiscard]] Eigen::Index n() const { return coeffs.rows(); }
  [[nodiscard]] Eigen::Index d() const { return coeffs.cols(); }
  void validate(double tol = kUnitNormTolerance) const;
};

/// C = X * basis.
[[nodiscard]] ModalCoordinates to_modal(const Configuration& cfg, const Spectrum& s);
/// X = C * basis^T.
[[nodiscard]] Configuration to_ambient(const ModalCoordinates& c, double beta);

/// Below this magnitude a coefficient is treated as off-support.
inline constexpr double kSupportThreshold = 1e-12;

/// Token-wise masses a_ik = c_ik^2 with their replicator fitness.
/// `fitness(i, k)` is meaningful only where `fitness_defined(i, k)`; elsewhere
/// it is stored as 0.
struct ModalMasses {
  Eigen::MatrixXd masses;
  Eigen::MatrixXd fitness;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> fitness_defined;
  Eigen::VectorXd mean_fitness;
};

struct ReplicatorView {
  ModalMasses masses;
  /// d/dt a_ik
  Eigen::MatrixXd mass_rates;
};

/// dC/dt = K C Lambda - Diag(K C Lambda C^T) C.
[[nodiscard]] Eigen::MatrixXd modal_field(const ModalCoordinates& c, double beta);

/// Replicator form a' = 2 a (f - mean f) on the support, 0 off-support.
[[nodiscard]] ReplicatorView replicator_view(const ModalCoordinates& c, double beta);

/// m_k = (1/n) sum_i c_ik^2.
[[nodiscard]] Eigen::VectorXd averaged_masses(const ModalCoordinates& c);

/// d/dt m_k evaluated from the full configuration (there is no closed
/// equation in m alone).
[[nodiscard]] Eigen::VectorXd averaged_mass_rates(const ModalCoordinates& c, double beta);

}  // namespace sal
