#include "sal/selection.hpp"

#include "sal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sal {

void require_negative_definite(const Spectrum& s) {
  for (Eigen::Index k = 0; k < s.dim(); ++k) {
    if (!(s.eigenvalues(k) < -1e-12)) {
      std::ostringstream msg;
      msg << "V must be negative definite: eigenvalue lambda_" << (k + 1) << " = "
          << s.eigenvalues(k);
      throw PreconditionError(msg.str());
    }
  }
}

ConeDiagnostics cone_check(const TrajectoryRecord& traj, const Spectrum& s, double delta) {
  if (traj.size() == 0) throw ValidationError("cone_check: empty trajectory");
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("cone_check: delta must lie in (0, 1)");
  const Eigen::Index d = s.dim();
  if (d < 2) throw ValidationError("cone_check: need d >= 2");
  const double l1 = s.eigenvalues(0);
  for (Eigen::Index k = 1; k < d; ++k) {
    if (!(l1 > std::abs(s.eigenvalues(k)))) {
      std::ostringstream msg;
      msg << "cone_check: spectral dominance fails, lambda_1 = " << l1 << " <= |lambda_" << (k + 1)
          << "| = " << std::abs(s.eigenvalues(k));
      throw PreconditionError(msg.str());
    }
  }

  const Eigen::MatrixXd c0 = traj.states.front() * s.basis;
  ConeDiagnostics out;
  out.delta = delta;
  if (c0.col(0).maxCoeff() <= -delta + 1e-12) out.orientation = -1;
  const double o = out.orientation;
  if ((o * c0.col(0)).minCoeff() < delta - 1e-12) {
    std::ostringstream msg;
    msg << "cone_check: initial data outside both cones: min_i c_i1 = " << c0.col(0).minCoeff()
        << ", max_i c_i1 = " << c0.col(0).maxCoeff() << ", delta = " << delta;
    throw PreconditionError(msg.str());
  }

  const auto records = static_cast<Eigen::Index>(traj.size());
  out.ratios.resize(records, d - 1);
  out.bounds.resize(records, d - 1);
  const double t0 = traj.times.front();
  for (Eigen::Index r = 0; r < records; ++r) {
    const auto idx = static_cast<std::size_t>(r);
    const Eigen::MatrixXd c = traj.states[idx] * s.basis;
    const double t = traj.times[idx];
    out.times.push_back(t);
    out.min_c1.push_back((o * c.col(0)).minCoeff());
    for (Eigen::Index k = 1; k < d; ++k) {
      out.ratios(r, k - 1) = (c.col(k).array() / c.col(0).array()).abs().maxCoeff();
      const double rate = delta * (l1 - std::abs(s.eigenvalues(k)));
      out.bounds(r, k - 1) = out.ratios(0, k - 1) * std::exp(-rate * (t - t0));
      out.worst_bound_excess =
          std::max(out.worst_bound_excess, out.ratios(r, k - 1) - out.bounds(r, k - 1));
    }
    if (r > 0) {
      out.worst_min_c1_drop = std::max(out.worst_min_c1_drop, out.min_c1[idx - 1] - out.min_c1[idx]);
    }
  }
  const Eigen::RowVectorXd e1 = o * s.basis.col(0).transpose();
  out.final_distance = (traj.final_states().rowwise() - e1).rowwise().norm().maxCoeff();
  return out;
}

TwoParticleDerivative rho_derivative_explicit(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
                                              const Spectrum& s, double beta) {
  require_negative_definite(s);
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw ValidationError("rho_derivative_explicit: beta must be finite and positive");
  }
  Configuration cfg{Eigen::MatrixXd(2, s.dim()), beta};
  cfg.states.row(0) = x1.transpose();
  cfg.states.row(1) = x2.transpose();
  cfg.validate();

  TwoParticleDerivative out;
  out.rho = x1.dot(x2);
  const Eigen::MatrixXd v = vector_field(cfg, s);
  out.rho_dot_dynamics = v.row(0).dot(x2) + x1.dot(v.row(1));

  const Eigen::MatrixXd b = -s.matrix;
  const Eigen::VectorXd sum = x1 + x2;
  const Eigen::VectorXd diff = x1 - x2;
  out.A = sum.dot(b * sum);
  out.C = sum.dot(b * diff);
  out.D = diff.dot(b * diff);

  const AttentionWeights k = attention_weights(cfg, s);
  out.eta_x = k.weights(0, 0) - k.weights(0, 1);
  out.eta_y = k.weights(1, 0) - k.weights(1, 1);

  if (std::abs(out.rho) >= 1.0 - 1e-12) {
    out.boundary = true;
    return out;
  }
  if (out.D < 1e-14) throw NumericError("rho_derivative_explicit: <d, B d> is numerically zero");

  out.E = out.A - out.C * out.C / out.D;
  out.r = beta * out.D / 2.0;
  out.t = beta * out.C / 2.0;
  out.xi = xi_certificate(out.r, out.t);

  const double rho = out.rho;
  const double r = out.r;
  const double t = out.t;
  const double ch = std::cosh(r) + std::cosh(t);
  const double num = (1.0 - rho) * beta * r * out.E + 2.0 * (1.0 + rho) * r * r * std::sinh(r) / ch +
                     2.0 * (1.0 - rho) * out.xi / ch;
  out.rho_dot = -num / (2.0 * beta * r);
  return out;
}

double xi_certificate(double r, double t) {
  if (!(r > 0.0)) throw ValidationError("xi_certificate: r must be positive");
  return t * t * (std::cosh(r) + std::cosh(t)) - r * t * std::sinh(t);
}

TwoParticleReport two_particle_limit_check(const TrajectoryRecord& traj, const Spectrum& s,
                                           double terminal_tol) {
  require_negative_definite(s);
  if (traj.size() == 0) throw ValidationError("two_particle_limit_check: empty trajectory");
  if (traj.states.front().rows() != 2) {
    throw PreconditionError("two_particle_limit_check: requires exactly two tokens");
  }
  Eigen::Index bottom = 0;
  s.eigenvalues.minCoeff(&bottom);
  for (Eigen::Index k = 0; k < s.dim(); ++k) {
    if (k != bottom && std::abs(s.eigenvalues(k) - s.eigenvalues(bottom)) <= 1e-10) {
      throw PreconditionError("two_particle_limit_check: smallest eigenvalue is not simple");
    }
  }

  TwoParticleReport out;
  const Eigen::MatrixXd& x0 = traj.states.front();
  const double rho0 = x0.row(0).dot(x0.row(1));
  if (rho0 >= 1.0 - 1e-12) {
    out.status = TwoParticleStatus::SkippedDiagonal;
    out.reason = "tokens coincide initially; the diagonal is invariant";
  } else if (rho0 <= -1.0 + 1e-12) {
    const Eigen::RowVectorXd c = x0.row(0) * s.basis;
    Eigen::Index top = 0;
    const double a = c.cwiseAbs().maxCoeff(&top);
    if (a >= 1.0 - 1e-12 && top != bottom) {
      out.status = TwoParticleStatus::ExceptionalStationary;
      std::ostringstream msg;
      msg << "antipodal pair on eigenvector " << (top + 1) << " is an equilibrium";
      out.reason = msg.str();
    }
  }

  const Eigen::VectorXd ed = s.basis.col(bottom);
  for (const auto& x : traj.states) {
    out.rho.push_back(std::clamp(x.row(0).dot(x.row(1)), -1.0, 1.0));
    out.bottom_alignment.push_back(std::min(std::abs(x.row(0).dot(ed)), std::abs(x.row(1).dot(ed))));
  }
  for (std::size_t k = 1; k < out.rho.size(); ++k) {
    out.worst_rho_increase = std::max(out.worst_rho_increase, out.rho[k] - out.rho[k - 1]);
  }
  out.terminal_rho = out.rho.back();
  out.terminal_alignment = out.bottom_alignment.back();
  const Eigen::MatrixXd& xf = traj.final_states();
  const double s1 = xf.row(0).dot(ed);
  const double s2 = xf.row(1).dot(ed);
  out.antipodal_on_bottom_mode =
      s1 * s2 < 0.0 && out.terminal_alignment >= 1.0 - terminal_tol;
  return out;
}

PairwiseObservables pairwise_observables(const Eigen::MatrixXd& states) {
  const Eigen::Index n = states.rows();
  if (n < 2) throw ValidationError("pairwise_observables: need at least two tokens");
  const Eigen::MatrixXd gram = states * states.transpose();
  PairwiseObservables out;
  out.rho_min = std::numeric_limits<double>::infinity();
  out.rho_max = -std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double g = std::clamp(gram(i, j), -1.0, 1.0);
      out.rho_min = std::min(out.rho_min, g);
      out.rho_max = std::max(out.rho_max, g);
      total += std::abs(g);
    }
  }
  out.rho_abs = total / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
  return out;
}

}  // namespace sal
