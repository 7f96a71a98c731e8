#include "sal/spectral.hpp"

#include "sal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

namespace sal {

Eigen::MatrixXd Spectrum::reconstruct() const {
  return basis * eigenvalues.asDiagonal() * basis.transpose();
}

double Spectrum::orthonormality_error() const {
  const Eigen::MatrixXd gram = basis.transpose() * basis;
  return (gram - Eigen::MatrixXd::Identity(dim(), dim())).cwiseAbs().maxCoeff();
}

double Spectrum::reconstruction_error() const {
  return (reconstruct() - matrix).cwiseAbs().maxCoeff();
}

Spectrum Spectrum::from_parts(Eigen::VectorXd eigenvalues, Eigen::MatrixXd basis) {
  if (basis.rows() != basis.cols() || basis.rows() != eigenvalues.size()) {
    throw ValidationError("spectrum: basis must be d x d with d eigenvalues");
  }
  Spectrum s{std::move(eigenvalues), std::move(basis), {}};
  if (s.dim() > 0 && s.orthonormality_error() > 1e-10) {
    throw ValidationError("spectrum: basis columns are not orthonormal");
  }
  s.matrix = s.reconstruct();
  return s;
}

namespace {

void check_symmetric(const Eigen::MatrixXd& v) {
  if (v.rows() != v.cols()) {
    std::ostringstream msg;
    msg << "interaction matrix must be square, got " << v.rows() << "x" << v.cols();
    throw ValidationError(msg.str());
  }
  if (!v.allFinite()) {
    throw ValidationError("interaction matrix has non-finite entries");
  }
  double worst = 0.0;
  Eigen::Index wi = 0, wj = 0;
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < v.cols(); ++j) {
      const double gap = std::abs(v(i, j) - v(j, i));
      if (gap > worst) {
        worst = gap;
        wi = i;
        wj = j;
      }
    }
  }
  if (worst > kSymmetryTolerance) {
    std::ostringstream msg;
    msg << "interaction matrix must be symmetric (Q^T K = V = V^T): |V(" << wi << ","
        << wj << ") - V(" << wj << "," << wi << ")| = " << worst;
    throw ValidationError(msg.str());
  }
}

double off_diagonal_norm(const Eigen::MatrixXd& a) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (i != j) sum += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(sum);
}

// One Jacobi rotation annihilating a(p,q); accumulates into q_mat.
void rotate(Eigen::MatrixXd& a, Eigen::MatrixXd& q_mat, Eigen::Index p, Eigen::Index q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(1.0, theta));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;
  const Eigen::Index n = a.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const double apk = a(p, k);
    const double aqk = a(q, k);
    a(p, k) = c * apk - s * aqk;
    a(q, k) = s * apk + c * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double qkp = q_mat(k, p);
    const double qkq = q_mat(k, q);
    q_mat(k, p) = c * qkp - s * qkq;
    q_mat(k, q) = s * qkp + c * qkq;
  }
}

}  // namespace

Spectrum decompose_symmetric(const Eigen::MatrixXd& v) {
  check_symmetric(v);
  const Eigen::Index d = v.rows();
  Eigen::MatrixXd a = 0.5 * (v + v.transpose());
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(d, d);

  // Scale-aware stopping: 1e-13 absolute for unit-scale matrices.
  const double tol = kJacobiOffDiagonalTolerance * std::max(1.0, a.norm());
  bool converged = off_diagonal_norm(a) <= tol;
  for (int sweep = 0; sweep < kJacobiMaxSweeps && !converged; ++sweep) {
    for (Eigen::Index p = 0; p < d; ++p) {
      for (Eigen::Index r = p + 1; r < d; ++r) rotate(a, q, p, r);
    }
    converged = off_diagonal_norm(a) <= tol;
  }
  if (!converged) {
    throw NumericError("decompose_symmetric: Jacobi sweeps did not converge");
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return a(x, x) > a(y, y); });

  Spectrum s;
  s.eigenvalues.resize(d);
  s.basis.resize(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    s.eigenvalues(k) = a(src, src);
    Eigen::VectorXd col = q.col(src);
    Eigen::Index arg = 0;
    col.cwiseAbs().maxCoeff(&arg);
    if (col(arg) < 0.0) col = -col;
    s.basis.col(k) = col;
  }
  s.matrix = 0.5 * (v + v.transpose());
  return s;
}

Spectrum spectrum_from_diagonal(std::span<const double> lambdas) {
  const auto d = static_cast<Eigen::Index>(lambdas.size());
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) v(k, k) = lambdas[static_cast<std::size_t>(k)];
  return decompose_symmetric(v);
}

Eigen::VectorXd to_modal(const Eigen::VectorXd& x, const Spectrum& s) {
  if (x.size() != s.dim()) {
    throw ValidationError("to_modal: dimension mismatch");
  }
  const double norm = x.norm();
  if (!(std::abs(norm - 1.0) <= 1e-10)) {
    std::ostringstream msg;
    msg << "to_modal: state must be a unit vector, |x| = " << norm;
    throw ValidationError(msg.str());
  }
  return s.basis.transpose() * x;
}

Eigen::VectorXd to_ambient(const Eigen::VectorXd& c, const Spectrum& s) {
  if (c.size() != s.dim()) {
    throw ValidationError("to_ambient: dimension mismatch");
  }
  return s.basis * c;
}

}  // namespace sal
