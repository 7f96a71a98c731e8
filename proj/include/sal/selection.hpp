#pragma once

#include "sal/dynamics.hpp"
#include "sal/spectral.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace sal {

/// Trajectory diagnostics for the one-sided cone {c_i1 >= delta}.
struct ConeDiagnostics {
  double delta = 0.0;
  /// +1 for the cone around e_1, -1 for the mirrored cone around -e_1
  int orientation = 1;
  std::vector<double> times;
  /// min_i orientation * c_i1
  std::vector<double> min_c1;
  /// row t, column k-1: R_k(t) = max_i |c_ik / c_i1| for k = 2..d
  Eigen::MatrixXd ratios;
  /// R_k(0) exp(-delta (lambda_1 - |lambda_k|) t)
  Eigen::MatrixXd bounds;
  /// max_i |x_i - orientation * e_1| at the final record
  double final_distance = 0.0;
  /// largest drop of min_c1 between consecutive records (<= 0 when monotone)
  double worst_min_c1_drop = 0.0;
  /// largest R_k(t) - bound_k(t)
  double worst_bound_excess = 0.0;

  [[nodiscard]] bool min_c1_monotone(double tol = 1e-9) const { return worst_min_c1_drop <= tol; }
  [[nodiscard]] bool bound_holds(double tol = 1e-9) const { return worst_bound_excess <= tol; }
};

/// Throws PreconditionError unless lambda_1 > max_{k>=2} |lambda_k| (modes
/// ordered by the spectrum) and every token starts with c_i1 >= delta, or
/// every token starts with c_i1 <= -delta (mirrored cone).
[[nodiscard]] ConeDiagnostics cone_check(const TrajectoryRecord& traj, const Spectrum& s,
                                         double delta);

/// Throws PreconditionError naming the offending eigenvalue unless V is
/// negative definite.
void require_negative_definite(const Spectrum& s);

struct TwoParticleDerivative {
  double rho = 0.0;
  double A = 0.0, C = 0.0, D = 0.0, E = 0.0;
  double eta_x = 0.0, eta_y = 0.0;
  double r = 0.0, t = 0.0;
  double xi = 0.0;
  /// closed-form value (0 on the boundary |rho| = 1)
  double rho_dot = 0.0;
  /// <v_1, x_2> + <x_1, v_2> from the full vector field
  double rho_dot_dynamics = 0.0;
  bool boundary = false;
};

/// d/dt <x_1, x_2> for n = 2 and negative definite V, expressed through
/// s = x_1 + x_2, d = x_1 - x_2 and B = -V. For |rho| >= 1 - 1e-12 the
/// value is reported as 0 and `boundary` is set.
[[nodiscard]] TwoParticleDerivative rho_derivative_explicit(const Eigen::VectorXd& x1,
                                                            const Eigen::VectorXd& x2,
                                                            const Spectrum& s, double beta);

/// Xi_r(t) = t^2 (cosh r + cosh t) - r t sinh t. Requires r > 0.
[[nodiscard]] double xi_certificate(double r, double t);

enum class TwoParticleStatus { Checked, SkippedDiagonal, ExceptionalStationary };

struct TwoParticleReport {
  TwoParticleStatus status = TwoParticleStatus::Checked;
  std::string reason;
  std::vector<double> rho;
  /// |<x_i, e_d>| for the bottom mode d, per record: min over the pair
  std::vector<double> bottom_alignment;
  /// largest increase of rho between consecutive records
  double worst_rho_increase = 0.0;
  double terminal_rho = 0.0;
  double terminal_alignment = 0.0;
  /// sign of <x_1, e_d> at the end, paired with the opposite one for x_2
  bool antipodal_on_bottom_mode = false;
};

/// Monotone rho and the terminal {e_d, -e_d} state for an n = 2 trajectory.
/// Requires V negative definite with a simple smallest eigenvalue.
[[nodiscard]] TwoParticleReport two_particle_limit_check(const TrajectoryRecord& traj,
                                                         const Spectrum& s,
                                                         double terminal_tol = 1e-3);

struct PairwiseObservables {
  double rho_min = 0.0;
  double rho_max = 0.0;
  /// mean over i < j of |<x_i, x_j>|
  double rho_abs = 0.0;
};

/// Requires n >= 2.
[[nodiscard]] PairwiseObservables pairwise_observables(const Eigen::MatrixXd& states);

}  // namespace sal
