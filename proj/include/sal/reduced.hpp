#pragma once

#include "sal/dynamics.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace sal {

/// Point of a reduced (consensus or balanced bipolar) dynamics.
struct ReducedState {
  Eigen::VectorXd p;
  /// Sign pattern s_i of the bipolar ansatz x_i = s_i u; empty for consensus.
  std::vector<int> signs;
  double M = 0.0;
  double alpha = 0.0;

  /// Builds the state and derives M = sum lambda_k p_k and alpha = tanh(beta M).
  static ReducedState make(Eigen::VectorXd p, const Eigen::VectorXd& lambdas, double beta,
                           std::vector<int> signs = {});
  void validate(const Eigen::VectorXd& lambdas, double beta) const;
};

inline constexpr double kReducedSupportThreshold = 1e-12;
inline constexpr double kEigenvalueTieTolerance = 1e-10;

/// Stabilized p_k(t) = p_k(0) e^{2 lambda_k t} / sum_l p_l(0) e^{2 lambda_l t}.
[[nodiscard]] Eigen::VectorXd consensus_closed_form(const Eigen::VectorXd& p0,
                                                    const Eigen::VectorXd& lambdas, double t);

/// Signed coefficients: c_k(t) = sgn(c_k(0)) sqrt(p_k(t)).
[[nodiscard]] Eigen::VectorXd consensus_coefficients(const Eigen::VectorXd& c0,
                                                     const Eigen::VectorXd& lambdas, double t);

/// p'_k = 2 p_k (lambda_k - sum_l lambda_l p_l).
[[nodiscard]] Eigen::VectorXd consensus_field(const Eigen::VectorXd& p,
                                              const Eigen::VectorXd& lambdas);

/// Limit of the consensus replicator: mass renormalized on the argmax set of
/// lambda over the initial support.
[[nodiscard]] Eigen::VectorXd consensus_limit(const Eigen::VectorXd& p0,
                                              const Eigen::VectorXd& lambdas);

struct BipolarRates {
  Eigen::VectorXd p_dot;
  /// 2 alpha(M) sum_k p_k (lambda_k - M)^2
  double M_dot = 0.0;
  /// sum_k lambda_k p_dot_k, the direct route
  double M_dot_direct = 0.0;
};

/// p'_k = 2 p_k alpha(M) (lambda_k - M).
[[nodiscard]] BipolarRates bipolar_field(const ReducedState& state,
                                         const Eigen::VectorXd& lambdas, double beta);

enum class BipolarRegime { Increasing, Decreasing, Stationary };

struct BipolarLimit {
  BipolarRegime regime = BipolarRegime::Stationary;
  Eigen::VectorXd p_limit;
  double M_limit = 0.0;
  std::vector<Eigen::Index> support;   // I_0
  std::vector<Eigen::Index> selected;  // I_+ or I_- (empty when stationary)
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
};

/// Case split on the sign of M(0): mass moves to the largest (M > 0) or
/// smallest (M < 0) eigenvalue on the initial support; M(0) = 0 is stationary.
[[nodiscard]] BipolarLimit bipolar_limit(const Eigen::VectorXd& p0,
                                         const Eigen::VectorXd& lambdas, double beta);

struct BipolarProfile {
  Eigen::VectorXd u;
  std::vector<int> signs;
};

/// Detects x_i = s_i u with n_+ = n_- within `tol` (max-norm). The returned
/// profile has its first non-negligible component positive.
[[nodiscard]] std::optional<BipolarProfile> check_bipolar_balance(const Configuration& cfg,
                                                                  double tol = 1e-8);

/// Time series of a reduced replicator ODE integrated with RK4.
struct ReducedTrajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> p;
  std::vector<double> M;
};

[[nodiscard]] ReducedTrajectory integrate_consensus(const Eigen::VectorXd& p0,
                                                    const Eigen::VectorXd& lambdas,
                                                    const IntegrationOptions& opts);

[[nodiscard]] ReducedTrajectory integrate_bipolar(const Eigen::VectorXd& p0,
                                                  const Eigen::VectorXd& lambdas, double beta,
                                                  const IntegrationOptions& opts);

}  // namespace sal
