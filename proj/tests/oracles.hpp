#pragma once

// Deliberately naive reference implementations. They share no code with the
// library: plain loops, no max subtraction, no cached products.

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

namespace oracle {

inline Eigen::MatrixXd softmax_weights(const Eigen::MatrixXd& x, const Eigen::MatrixXd& v, double beta) {
  const auto n = x.rows();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double z = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      double score = 0.0;
      for (Eigen::Index a = 0; a < x.cols(); ++a) {
        for (Eigen::Index b = 0; b < x.cols(); ++b) score += x(i, a) * v(a, b) * x(j, b);
      }
      k(i, j) = std::exp(beta * score);
      z += k(i, j);
    }
    for (Eigen::Index j = 0; j < n; ++j) k(i, j) /= z;
  }
  return k;
}

inline Eigen::MatrixXd vector_field(const Eigen::MatrixXd& x, const Eigen::MatrixXd& v, double beta) {
  const auto n = x.rows();
  const auto d = x.cols();
  const Eigen::MatrixXd k = softmax_weights(x, v, beta);
  Eigen::MatrixXd out(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<double> w(static_cast<std::size_t>(d), 0.0);
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = 0; b < d; ++b) w[a] += k(i, j) * v(a, b) * x(j, b);
      }
    }
    double phi = 0.0;
    for (Eigen::Index a = 0; a < d; ++a) phi += w[a] * x(i, a);
    for (Eigen::Index a = 0; a < d; ++a) out(i, a) = w[a] - phi * x(i, a);
  }
  return out;
}

inline double energy(const Eigen::MatrixXd& x, const Eigen::MatrixXd& v, double beta) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.rows(); ++j) {
      const double score = x.row(i) * v * x.row(j).transpose();
      total += std::exp(beta * score);
    }
  }
  return total / (2.0 * beta);
}

/// p_k(0) e^{2 lambda_k t} / sum_l p_l(0) e^{2 lambda_l t}, unstabilized.
inline Eigen::VectorXd consensus_masses(const Eigen::VectorXd& p0, const Eigen::VectorXd& lambdas,
                                        double t) {
  Eigen::VectorXd w(p0.size());
  for (Eigen::Index k = 0; k < p0.size(); ++k) w(k) = p0(k) * std::exp(2.0 * lambdas(k) * t);
  return w / w.sum();
}

inline double sigma(double c, double r) { return (c - r) * (c * r - 1.0) / (r * (c * c - 1.0)); }

inline Eigen::MatrixXd random_unit_rows(Eigen::Index n, Eigen::Index d, std::mt19937_64& gen) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index a = 0; a < d; ++a) x(i, a) = normal(gen);
    x.row(i).normalize();
  }
  return x;
}

inline Eigen::MatrixXd random_symmetric(Eigen::Index d, std::mt19937_64& gen, double scale = 1.0) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd a(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = normal(gen);
  }
  return scale * 0.5 * (a + a.transpose());
}

}  // namespace oracle
