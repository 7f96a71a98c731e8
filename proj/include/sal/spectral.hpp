#pragma once

#include <Eigen/Dense>

#include <span>

namespace sal {

/// Orthonormal eigen-decomposition of the symmetric interaction matrix.
///
/// `basis` holds the eigenvectors e_k as columns; `eigenvalues(k)` pairs with
/// column k. `matrix` keeps the (symmetrized) input so the ambient dynamics
/// can use it directly.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd basis;
  Eigen::MatrixXd matrix;

  [[nodiscard]] Eigen::Index dim() const { return eigenvalues.size(); }

  /// basis * diag(eigenvalues) * basis^T
  [[nodiscard]] Eigen::MatrixXd reconstruct() const;
  /// max |basis^T basis - I|
  [[nodiscard]] double orthonormality_error() const;
  /// max |reconstruct() - matrix|
  [[nodiscard]] double reconstruction_error() const;

  /// Wraps an already known eigen-pair set without re-decomposing. The
  /// eigenvalue order is kept as given. Throws ValidationError if the basis
  /// is not orthonormal within 1e-10.
  static Spectrum from_parts(Eigen::VectorXd eigenvalues, Eigen::MatrixXd basis);
};

inline constexpr double kSymmetryTolerance = 1e-12;
inline constexpr double kJacobiOffDiagonalTolerance = 1e-13;
inline constexpr int kJacobiMaxSweeps = 100;

/// Cyclic Jacobi eigen-decomposition. Eigenvalues are returned in descending
/// order; each eigenvector has its largest-magnitude component positive.
///
/// Throws ValidationError for non-square input or asymmetry above 1e-12
/// (the message names the worst entry), NumericError if the sweeps do not
/// converge.
[[nodiscard]] Spectrum decompose_symmetric(const Eigen::MatrixXd& v);

/// Shorthand for V = diag(lambdas); same ordering rules as decompose_symmetric.
[[nodiscard]] Spectrum spectrum_from_diagonal(std::span<const double> lambdas);

/// c = basis^T x. Requires |x| = 1 within 1e-10.
[[nodiscard]] Eigen::VectorXd to_modal(const Eigen::VectorXd& x, const Spectrum& s);

/// x = basis c.
[[nodiscard]] Eigen::VectorXd to_ambient(const Eigen::VectorXd& c, const Spectrum& s);

}  // namespace sal
