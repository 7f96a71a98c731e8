#pragma once

#include "sal/spectral.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace sal {

inline constexpr double kUnitNormTolerance = 1e-9;

/// n tokens on S^{d-1} (rows of `states`) together with the attention
/// sharpness beta. The 1/sqrt(d) score scaling is folded into beta.
struct Configuration {
  Eigen::MatrixXd states;
  double beta = 1.0;

  [[nodiscard]] Eigen::Index n() const { return states.rows(); }
  [[nodiscard]] Eigen::Index d() const { return states.cols(); }

  /// Throws ValidationError unless beta >= 0 is finite and every row has
  /// unit norm within `tol`.
  void validate(double tol = kUnitNormTolerance) const;
};

/// Row-stochastic softmax matrix K and the per-row log partition log Z_i.
struct AttentionWeights {
  Eigen::MatrixXd weights;
  Eigen::VectorXd row_log_norms;
};

/// K_ij = exp(beta <x_i, V x_j> - log Z_i), evaluated with per-row
/// max subtraction. Throws NumericError naming (i, j) on a non-finite score.
[[nodiscard]] AttentionWeights attention_weights(const Configuration& cfg, const Spectrum& s);

/// v_i = sum_j K_ij V x_j - phi_i x_i with phi_i = <x_i, sum_j K_ij V x_j>.
[[nodiscard]] Eigen::MatrixXd vector_field(const Configuration& cfg, const Spectrum& s);

/// E_beta = (1 / 2 beta) sum_ij exp(beta <x_i, V x_j>). Requires beta > 0.
[[nodiscard]] double energy(const Configuration& cfg, const Spectrum& s);

struct TrajectoryRecord {
  double beta = 1.0;
  std::vector<double> times;
  std::vector<Eigen::MatrixXd> states;
  /// NaN when beta == 0 (the energy is undefined there).
  std::vector<double> energies;
  /// Largest (E_k - E_{k+1}) / max(1, |E_k|) over consecutive integration
  /// steps, recorded or not. Stays 0 when energies are not tracked.
  double worst_step_energy_drop = 0.0;

  bool aborted = false;
  double last_valid_time = 0.0;
  std::string abort_reason;

  [[nodiscard]] std::size_t size() const { return times.size(); }
  [[nodiscard]] Configuration snapshot(std::size_t k) const { return {states[k], beta}; }
  [[nodiscard]] const Eigen::MatrixXd& final_states() const { return states.back(); }
};

struct IntegrationOptions {
  double t_end = 0.0;
  double dt = 1e-2;
  /// Record a snapshot every this many steps; the final step is always kept.
  int record_every = 1;
  /// Also tracks worst_step_energy_drop, evaluated after every step.
  bool record_energy = true;
};

/// Classical RK4 on the ambient field, each step followed by row
/// renormalization onto the sphere. The step count is ceil(t_end / dt) with
/// the step shrunk uniformly so the final time equals t_end exactly.
/// A non-finite state stops the run: `aborted` is set and the record ends at
/// `last_valid_time`.
[[nodiscard]] TrajectoryRecord integrate(const Configuration& cfg0, const Spectrum& s,
                                         const IntegrationOptions& opts);

namespace detail {

/// Shared kernel for the projected softmax field.
///
/// Rows of `x` are the states, rows of `w` the transformed states (V x_j, or
/// C Lambda in modal coordinates). Scores are beta * x * w^T.
class AttentionField {
 public:
  void evaluate(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w, double beta,
                Eigen::MatrixXd& out);
  [[nodiscard]] const Eigen::MatrixXd& weights() const { return weights_; }
  [[nodiscard]] const Eigen::VectorXd& log_norms() const { return log_norms_; }

 private:
  Eigen::MatrixXd weights_;
  Eigen::VectorXd log_norms_;
  Eigen::MatrixXd mixed_;
};

void compute_weights(const Eigen::MatrixXd& scores, Eigen::MatrixXd& weights,
                     Eigen::VectorXd& log_norms);

}  // namespace detail

}  // namespace sal
