#pragma once

#include "sal/dynamics.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sal::verify {

struct CheckResult {
  std::string id;
  bool passed = false;
  std::string detail;
  std::vector<std::pair<std::string, double>> metrics;
  /// Reported numbers that should not depend on the step size.
  std::vector<double> observables;
  /// Largest relative energy decrease between consecutive steps, over all
  /// integrated trajectories (<= 0 means nondecreasing).
  double worst_energy_drop = 0.0;
  std::size_t trajectories = 0;
  double seconds = 0.0;

  void metric(std::string name, double value) { metrics.emplace_back(std::move(name), value); }
  [[nodiscard]] double metric(std::string_view name) const;
};

/// Max over consecutive records of (E_k - E_{k+1}) / max(1, |E_k|).
[[nodiscard]] double energy_drop(const TrajectoryRecord& rec);

/// Random orthogonal d x d matrix (Householder QR of a Gaussian matrix).
[[nodiscard]] Eigen::MatrixXd random_orthogonal(Eigen::Index d, std::uint64_t seed);

struct ConsensusParams {
  int seeds = 20;
  Eigen::Index n = 3;
  Eigen::Index d_min = 2;
  Eigen::Index d_max = 8;
  double t_end = 10.0;
  double dt = 5e-3;
  int record_every = 20;
  /// relative tolerance for masses at or above `relative_floor`
  double tol = 1e-6;
  double relative_floor = 1e-10;
  /// absolute tolerance below the floor
  double abs_tol = 1e-12;
  std::uint64_t seed = 1;
};
[[nodiscard]] CheckResult consensus_closed_form(const ConsensusParams& p);

struct SelectionParams {
  int seeds = 20;
  Eigen::Index n = 3;
  Eigen::Index d_min = 2;
  Eigen::Index d_max = 8;
  double t_end = 50.0;
  double dt = 1e-2;
  double min_gap = 0.5;
  double tol = 1e-4;
  std::uint64_t seed = 101;
};
[[nodiscard]] CheckResult consensus_selection(const SelectionParams& p);

struct BipolarParams {
  std::vector<Eigen::Index> n_values{2, 4};
  int trials_per_n = 6;
  double beta = 1.0;
  double t_end = 20.0;
  double dt = 1e-2;
  int record_every = 1;
  double tol_p = 1e-6;
  double tol_monotone = 1e-10;
  double tol_limit = 1e-4;
  std::uint64_t seed = 201;
};
[[nodiscard]] CheckResult bipolar_reduction(const BipolarParams& p);

struct OracleParams {
  int trials = 50;
  Eigen::Index d_max = 5;
  Eigen::Index n_max = 8;
  double h = 1e-5;
  double tol = 1e-5;
  std::uint64_t seed = 301;
};
[[nodiscard]] CheckResult spectrum_oracle(const OracleParams& p);

struct ThresholdParams {
  std::vector<double> ratios{1.0, 2.0, 4.0};
  double lambda_p = 1.0;
  /// offsets added to the endpoint beta*
  std::vector<double> beta_offsets{0.05, 0.1, 0.25, 0.5, 1.0, 2.0};
  double bracket = 1e-6;
  double tanh_tol = 1e-12;
};
[[nodiscard]] CheckResult threshold_sharpness(const ThresholdParams& p);

struct ConeParams {
  Eigen::Index n = 80;
  double beta = 1.0;
  double delta = 0.1;
  int trials = 100;
  std::vector<double> lambdas{1.5, 0.5, -0.5};
  double t_end = 6.0;
  double dt = 1e-2;
  int record_every = 5;
  double tol = 1e-9;
  double terminal_tol = 1e-2;
  std::uint64_t seed = 401;
};
[[nodiscard]] CheckResult cone(const ConeParams& p);

struct TwoParticleParams {
  int samples = 500;
  int trials = 50;
  std::vector<double> lambdas{-0.5, -1.25, -2.0};
  double beta = 1.0;
  double t_end = 50.0;
  double dt = 1e-2;
  int record_every = 10;
  double tol = 1e-10;
  double terminal_tol = 1e-3;
  std::uint64_t seed = 501;
};
[[nodiscard]] CheckResult rho_monotone(const TwoParticleParams& p);

struct XiParams {
  int r_points = 401;
  int t_points = 401;
  double r_max = 10.0;
  double t_max = 10.0;
};
[[nodiscard]] CheckResult xi_grid(const XiParams& p);

/// Command-line overrides applied on top of a suite's defaults.
struct SuiteOverrides {
  std::optional<int> trials;
  std::optional<Eigen::Index> n;
  std::optional<double> beta;
  std::optional<double> delta;
  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<std::uint64_t> seed;
};

[[nodiscard]] const std::vector<std::string>& suite_ids();
/// Throws ValidationError for an unknown id.
[[nodiscard]] CheckResult run_suite(std::string_view id, const SuiteOverrides& o);

}  // namespace sal::verify
