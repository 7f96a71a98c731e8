#pragma once

#include "sal/dynamics.hpp"
#include "sal/spectral.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sal {

/// Signs s_i of a pure-mode equilibrium x_i = s_i e_p.
struct SignPattern {
  std::vector<int> signs;

  /// Parses "+-+" style strings (also accepts "1,-1,1").
  static SignPattern parse(std::string_view text);
  static SignPattern split(int n_plus, int n_minus);

  [[nodiscard]] int n() const { return static_cast<int>(signs.size()); }
  [[nodiscard]] int n_plus() const;
  [[nodiscard]] int n_minus() const;
  [[nodiscard]] bool is_constant() const { return n_plus() == 0 || n_minus() == 0; }
  /// r = n_+ / n_-; requires n_- >= 1.
  [[nodiscard]] double ratio() const;
  void validate() const;
};

enum class Verdict { Stable, Unstable, Marginal };
[[nodiscard]] std::string_view to_string(Verdict v);

/// Rates are classified as zero within this band.
inline constexpr double kMarginalBand = 1e-12;

struct HomogeneousStability {
  Verdict verdict = Verdict::Marginal;
  /// (mode k, lambda_k - lambda_p) for each k != p
  std::vector<std::pair<Eigen::Index, double>> mean_rates;
  /// -lambda_p, shared by every fluctuation component
  double fluctuation_rate = 0.0;
  /// every distinct linear rate: mean rates followed by the fluctuation rate
  std::vector<double> rates;
};

/// Linear rates of x_i = e_p for all i. Unstable if any rate > 1e-12,
/// otherwise marginal if any rate is within 1e-12 of zero, otherwise stable.
[[nodiscard]] HomogeneousStability homogeneous_stability(Eigen::Index p,
                                                         const Eigen::VectorXd& lambdas);

struct ModeBlock {
  Eigen::Index mode = 0;
  Eigen::Matrix2d matrix;
  double trace = 0.0;
  double det = 0.0;
  std::array<std::complex<double>, 2> eigenvalues;
};

struct StabilityReport {
  Eigen::Index mode = 0;
  int n_plus = 0;
  int n_minus = 0;
  double a_plus = 0.0, b_plus = 0.0, a_minus = 0.0, b_minus = 0.0;
  double gamma_plus = 0.0, gamma_minus = 0.0;
  std::vector<ModeBlock> blocks;
  /// gamma_+ > 0, gamma_- > 0 and tr(B_k) < 0, det(B_k) > 0 for all k != p.
  bool stable = false;
  /// Classification of the full linear spectrum (see equilibrium_spectrum).
  /// Differs from `stable` only when a sign group is a singleton: the
  /// within-group rate -gamma then has multiplicity zero.
  Verdict spectral_verdict = Verdict::Marginal;
  double c_beta = 0.0;
  /// sigma(c_beta, r)
  double threshold_sigma = 0.0;
};

/// Block constants, B_k matrices and the stability predicate of a
/// nonconstant sign-split equilibrium x_i = s_i e_p.
/// Throws ValidationError for a constant pattern or beta <= 0.
[[nodiscard]] StabilityReport sign_split_report(Eigen::Index p, const Eigen::VectorXd& lambdas,
                                                double beta, const SignPattern& pattern);

struct SpectrumEntry {
  std::complex<double> value;
  int multiplicity = 1;
  Eigen::Index mode = 0;
};

/// Linearization eigenvalues at x_i = s_i e_p, per transverse mode k != p.
/// Constant patterns: lambda_k - lambda_p (x1) and -lambda_p (x n-1).
/// Sign-split: -gamma_+ (x n_+ - 1), -gamma_- (x n_- - 1) and eig(B_k).
/// Zero-multiplicity entries are omitted.
[[nodiscard]] std::vector<SpectrumEntry> equilibrium_spectrum(Eigen::Index p,
                                                              const Eigen::VectorXd& lambdas,
                                                              double beta,
                                                              const SignPattern& pattern);

/// Flattens entries by multiplicity.
[[nodiscard]] std::vector<std::complex<double>> expand(std::span<const SpectrumEntry> entries);

[[nodiscard]] Verdict classify(std::span<const std::complex<double>> eigenvalues);

/// x_i = s_i e_p built from the spectrum's basis column p.
[[nodiscard]] Configuration pure_mode_configuration(const Spectrum& s, Eigen::Index p,
                                                    const SignPattern& pattern, double beta);

inline constexpr double kDefaultJacobianStep = 1e-5;

/// Eigenvalues of the central-difference Jacobian of the full vector field,
/// restricted to the tangent directions e_k (k != p) at every token.
/// Requires every row of `equilibrium` to be +-e_p within 1e-10 and
/// h in [1e-7, 1e-4].
[[nodiscard]] std::vector<std::complex<double>> jacobian_oracle(const Configuration& equilibrium,
                                                                const Spectrum& s, double beta,
                                                                double h = kDefaultJacobianStep);

/// Largest distance between paired elements after greedy nearest matching;
/// +inf if sizes differ.
[[nodiscard]] double multiset_distance(std::span<const std::complex<double>> a,
                                       std::span<const std::complex<double>> b);

/// sigma(c, r) = (c - r)(c r - 1) / (r (c^2 - 1)), written in terms of the
/// exponent x = 2 beta lambda_p (c = e^x) to avoid cancellation near x = 0
/// and overflow for large |x|. At x = 0 the one-sided limit is returned:
/// 0 for r = 1, -inf (x -> 0+) otherwise.
[[nodiscard]] double sigma_threshold(double exponent, double r);

struct ThresholdPoint {
  double beta = 0.0;
  /// lambda_p * sigma(c_beta, r)
  double sigma_bound = 0.0;
  bool is_endpoint = false;
  std::string note;
};

/// lambda_p * sigma(e^{2 beta lambda_p}, r) over the grid. The endpoint
/// beta* = |ln r| / (2 |lambda_p|), where the bound vanishes, is always
/// included and flagged.
[[nodiscard]] std::vector<ThresholdPoint> threshold_curve(double lambda_p, double r,
                                                          std::span<const double> beta_grid);

}  // namespace sal
