#include "sal/modal.hpp"

#include "sal/errors.hpp"

#include <cmath>
#include <sstream>

namespace sal {

void ModalCoordinates::validate(double tol) const {
  if (coeffs.cols() != spectrum.dim()) {
    throw ValidationError("modal coordinates: dimension does not match spectrum");
  }
  for (Eigen::Index i = 0; i < coeffs.rows(); ++i) {
    const double norm = coeffs.row(i).norm();
    if (!(std::abs(norm - 1.0) <= tol)) {
      std::ostringstream msg;
      msg << "modal coordinates: row " << i << " has norm " << norm;
      throw ValidationError(msg.str());
    }
  }
}

ModalCoordinates to_modal(const Configuration& cfg, const Spectrum& s) {
  cfg.validate();
  if (cfg.d() != s.dim()) throw ValidationError("to_modal: dimension mismatch");
  return {cfg.states * s.basis, s};
}

Configuration to_ambient(const ModalCoordinates& c, double beta) {
  if (c.d() != c.spectrum.dim()) throw ValidationError("to_ambient: dimension mismatch");
  return {c.coeffs * c.spectrum.basis.transpose(), beta};
}

namespace {

struct ModalTerms {
  Eigen::MatrixXd weights;       // K
  Eigen::MatrixXd mixed;         // K C
  Eigen::VectorXd mean_fitness;  // phi
};

ModalTerms modal_terms(const ModalCoordinates& c, double beta) {
  c.validate();
  if (!std::isfinite(beta) || beta < 0.0) {
    throw ValidationError("modal: beta must be finite and non-negative");
  }
  const Eigen::VectorXd& lambda = c.spectrum.eigenvalues;
  const Eigen::MatrixXd c_lambda = c.coeffs * lambda.asDiagonal();
  const Eigen::MatrixXd scores = beta * (c_lambda * c.coeffs.transpose());
  ModalTerms t;
  Eigen::VectorXd log_norms;
  detail::compute_weights(scores, t.weights, log_norms);
  t.mixed = t.weights * c.coeffs;
  // phi_i = sum_l c_il lambda_l (K C)_il
  t.mean_fitness = (t.mixed * lambda.asDiagonal()).cwiseProduct(c.coeffs).rowwise().sum();
  return t;
}

}  // namespace

Eigen::MatrixXd modal_field(const ModalCoordinates& c, double beta) {
  const ModalTerms t = modal_terms(c, beta);
  return t.mixed * c.spectrum.eigenvalues.asDiagonal() - t.mean_fitness.asDiagonal() * c.coeffs;
}

ReplicatorView replicator_view(const ModalCoordinates& c, double beta) {
  const ModalTerms t = modal_terms(c, beta);
  const Eigen::VectorXd& lambda = c.spectrum.eigenvalues;
  const Eigen::Index n = c.n();
  const Eigen::Index d = c.d();

  ReplicatorView view;
  ModalMasses& m = view.masses;
  m.masses = c.coeffs.cwiseAbs2();
  m.fitness = Eigen::MatrixXd::Zero(n, d);
  m.fitness_defined.setConstant(n, d, false);
  m.mean_fitness = t.mean_fitness;
  view.mass_rates = Eigen::MatrixXd::Zero(n, d);

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) {
      const double cik = c.coeffs(i, k);
      if (std::abs(cik) <= kSupportThreshold) continue;
      const double f = lambda(k) * t.mixed(i, k) / cik;
      m.fitness(i, k) = f;
      m.fitness_defined(i, k) = true;
      view.mass_rates(i, k) = 2.0 * m.masses(i, k) * (f - t.mean_fitness(i));
    }
  }
  return view;
}

Eigen::VectorXd averaged_masses(const ModalCoordinates& c) {
  c.validate();
  return c.coeffs.cwiseAbs2().colwise().mean().transpose();
}

Eigen::VectorXd averaged_mass_rates(const ModalCoordinates& c, double beta) {
  const Eigen::MatrixXd field = modal_field(c, beta);
  return (2.0 * c.coeffs.cwiseProduct(field)).colwise().mean().transpose();
}

}  // namespace sal
