#include "sal/dynamics.hpp"

#include "sal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sal {

void Configuration::validate(double tol) const {
  if (!std::isfinite(beta) || beta < 0.0) {
    throw ValidationError("configuration: beta must be a finite non-negative number");
  }
  if (states.rows() == 0 || states.cols() == 0) {
    throw ValidationError("configuration: need at least one token in dimension >= 1");
  }
  for (Eigen::Index i = 0; i < states.rows(); ++i) {
    const double norm = states.row(i).norm();
    if (!(std::abs(norm - 1.0) <= tol)) {
      std::ostringstream msg;
      msg << "configuration: token " << i << " is not on the unit sphere (|x| = " << norm
          << ")";
      throw ValidationError(msg.str());
    }
  }
}

namespace detail {

void compute_weights(const Eigen::MatrixXd& scores, Eigen::MatrixXd& weights,
                     Eigen::VectorXd& log_norms) {
  if (!scores.allFinite()) {
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
      for (Eigen::Index j = 0; j < scores.cols(); ++j) {
        if (!std::isfinite(scores(i, j))) {
          std::ostringstream msg;
          msg << "attention score at (" << i << "," << j << ") is not finite";
          throw NumericError(msg.str());
        }
      }
    }
  }
  const Eigen::VectorXd row_max = scores.rowwise().maxCoeff();
  weights = (scores.colwise() - row_max).array().exp().matrix();
  const Eigen::VectorXd z = weights.rowwise().sum();
  weights.array().colwise() /= z.array();
  log_norms = row_max.array() + z.array().log();
}

void AttentionField::evaluate(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w,
                              double beta, Eigen::MatrixXd& out) {
  const Eigen::MatrixXd scores = beta * (x * w.transpose());
  compute_weights(scores, weights_, log_norms_);
  mixed_.noalias() = weights_ * w;
  const Eigen::VectorXd phi = (mixed_.array() * x.array()).rowwise().sum();
  out = mixed_ - phi.asDiagonal() * x;
}

}  // namespace detail

AttentionWeights attention_weights(const Configuration& cfg, const Spectrum& s) {
  cfg.validate();
  if (cfg.d() != s.dim()) throw ValidationError("attention_weights: dimension mismatch");
  const Eigen::MatrixXd w = cfg.states * s.matrix;
  const Eigen::MatrixXd scores = cfg.beta * (cfg.states * w.transpose());
  AttentionWeights out;
  detail::compute_weights(scores, out.weights, out.row_log_norms);
  return out;
}

Eigen::MatrixXd vector_field(const Configuration& cfg, const Spectrum& s) {
  cfg.validate();
  if (cfg.d() != s.dim()) throw ValidationError("vector_field: dimension mismatch");
  detail::AttentionField field;
  Eigen::MatrixXd out;
  field.evaluate(cfg.states, cfg.states * s.matrix, cfg.beta, out);
  return out;
}

namespace {

double energy_unchecked(const Eigen::MatrixXd& x, const Eigen::MatrixXd& v, double beta) {
  const Eigen::MatrixXd scores = beta * (x * (x * v).transpose());
  if (!scores.allFinite()) throw NumericError("energy: non-finite attention score");
  // Global max subtraction keeps every exponent <= 0.
  const double global_max = scores.maxCoeff();
  const double total = (scores.array() - global_max).exp().sum();
  return std::exp(global_max + std::log(total)) / (2.0 * beta);
}

}  // namespace

double energy(const Configuration& cfg, const Spectrum& s) {
  if (!(cfg.beta > 0.0)) throw ValidationError("energy: beta must be positive");
  cfg.validate();
  if (cfg.d() != s.dim()) throw ValidationError("energy: dimension mismatch");
  return energy_unchecked(cfg.states, s.matrix, cfg.beta);
}

TrajectoryRecord integrate(const Configuration& cfg0, const Spectrum& s,
                           const IntegrationOptions& opts) {
  cfg0.validate();
  if (cfg0.d() != s.dim()) throw ValidationError("integrate: dimension mismatch");
  if (!(opts.dt > 0.0) || !std::isfinite(opts.dt)) {
    throw ValidationError("integrate: dt must be positive");
  }
  if (!(opts.t_end >= 0.0) || !std::isfinite(opts.t_end)) {
    throw ValidationError("integrate: t_end must be non-negative");
  }
  if (opts.record_every < 1) throw ValidationError("integrate: record_every must be >= 1");

  const double beta = cfg0.beta;
  const Eigen::MatrixXd& v = s.matrix;
  const bool with_energy = opts.record_energy && beta > 0.0;

  TrajectoryRecord rec;
  rec.beta = beta;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto push = [&](double t, const Eigen::MatrixXd& x, double e) {
    rec.times.push_back(t);
    rec.states.push_back(x);
    rec.energies.push_back(e);
  };

  Eigen::MatrixXd x = cfg0.states;
  double e_prev = with_energy ? energy_unchecked(x, v, beta) : nan;
  push(0.0, x, e_prev);

  const auto steps = static_cast<long>(std::ceil(opts.t_end / opts.dt - 1e-9));
  if (steps <= 0) return rec;
  const double h = opts.t_end / static_cast<double>(steps);

  detail::AttentionField field;
  Eigen::MatrixXd k1, k2, k3, k4, stage;
  auto eval = [&](const Eigen::MatrixXd& at, Eigen::MatrixXd& out) {
    field.evaluate(at, at * v, beta, out);
  };

  for (long step = 1; step <= steps; ++step) {
    try {
      eval(x, k1);
      stage = x + 0.5 * h * k1;
      eval(stage, k2);
      stage = x + 0.5 * h * k2;
      eval(stage, k3);
      stage = x + h * k3;
      eval(stage, k4);
    } catch (const NumericError& e) {
      rec.aborted = true;
      rec.abort_reason = e.what();
      return rec;
    }
    Eigen::MatrixXd next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    next.rowwise().normalize();
    if (!next.allFinite()) {
      rec.aborted = true;
      rec.abort_reason = "non-finite state after RK4 step";
      return rec;
    }
    x = std::move(next);
    const double t = (step == steps) ? opts.t_end : static_cast<double>(step) * h;
    rec.last_valid_time = t;
    double e = nan;
    if (with_energy) {
      e = energy_unchecked(x, v, beta);
      rec.worst_step_energy_drop =
          std::max(rec.worst_step_energy_drop, (e_prev - e) / std::max(1.0, std::abs(e_prev)));
      e_prev = e;
    }
    if (step % opts.record_every == 0 || step == steps) push(t, x, e);
  }
  return rec;
}

}  // namespace sal
