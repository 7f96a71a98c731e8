#include "sal/reduced.hpp"

#include "sal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace sal {

namespace {

void check_simplex(const Eigen::VectorXd& p, const char* who) {
  if (p.size() == 0 || !p.allFinite() || p.minCoeff() < -1e-12 ||
      std::abs(p.sum() - 1.0) > 1e-10) {
    std::ostringstream msg;
    msg << who << ": masses must lie on the probability simplex";
    throw ValidationError(msg.str());
  }
}

void check_lambdas(const Eigen::VectorXd& p, const Eigen::VectorXd& lambdas, const char* who) {
  if (p.size() != lambdas.size()) {
    std::ostringstream msg;
    msg << who << ": expected " << p.size() << " eigenvalues, got " << lambdas.size();
    throw ValidationError(msg.str());
  }
}

bool ties(double a, double b) {
  return std::abs(a - b) <= kEigenvalueTieTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

std::vector<Eigen::Index> support_of(const Eigen::VectorXd& p) {
  std::vector<Eigen::Index> out;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    if (p(k) > kReducedSupportThreshold) out.push_back(k);
  }
  return out;
}

// Renormalized restriction of p0 to the indices whose eigenvalue ties `target`.
Eigen::VectorXd concentrate(const Eigen::VectorXd& p0, const Eigen::VectorXd& lambdas,
                            const std::vector<Eigen::Index>& support, double target,
                            std::vector<Eigen::Index>& selected) {
  selected.clear();
  double mass = 0.0;
  for (Eigen::Index k : support) {
    if (ties(lambdas(k), target)) {
      selected.push_back(k);
      mass += p0(k);
    }
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(p0.size());
  for (Eigen::Index k : selected) out(k) = p0(k) / mass;
  return out;
}

using Field = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

ReducedTrajectory integrate_replicator(const Eigen::VectorXd& p0, const Eigen::VectorXd& lambdas,
                                       const IntegrationOptions& opts, const Field& f) {
  if (!(opts.dt > 0.0) || !(opts.t_end >= 0.0) || opts.record_every < 1) {
    throw ValidationError("reduced integration: need dt > 0, t_end >= 0, record_every >= 1");
  }
  ReducedTrajectory out;
  auto push = [&](double t, const Eigen::VectorXd& p) {
    out.times.push_back(t);
    out.p.push_back(p);
    out.M.push_back(lambdas.dot(p));
  };
  Eigen::VectorXd p = p0;
  push(0.0, p);
  const auto steps = static_cast<long>(std::ceil(opts.t_end / opts.dt - 1e-9));
  if (steps <= 0) return out;
  const double h = opts.t_end / static_cast<double>(steps);
  for (long step = 1; step <= steps; ++step) {
    const Eigen::VectorXd k1 = f(p);
    const Eigen::VectorXd k2 = f(p + 0.5 * h * k1);
    const Eigen::VectorXd k3 = f(p + 0.5 * h * k2);
    const Eigen::VectorXd k4 = f(p + h * k3);
    p += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!p.allFinite()) throw NumericError("reduced integration: non-finite state");
    const double t = (step == steps) ? opts.t_end : static_cast<double>(step) * h;
    if (step % opts.record_every == 0 || step == steps) push(t, p);
  }
  return out;
}

}  // namespace

ReducedState ReducedState::make(Eigen::VectorXd p, const Eigen::VectorXd& lambdas, double beta,
                                std::vector<int> signs) {
  check_lambdas(p, lambdas, "reduced state");
  ReducedState s;
  s.M = lambdas.dot(p);
  s.alpha = std::tanh(beta * s.M);
  s.p = std::move(p);
  s.signs = std::move(signs);
  return s;
}

void ReducedState::validate(const Eigen::VectorXd& lambdas, double beta) const {
  check_simplex(p, "reduced state");
  check_lambdas(p, lambdas, "reduced state");
  if (std::abs(M - lambdas.dot(p)) > 1e-12) {
    throw ValidationError("reduced state: M does not match sum lambda_k p_k");
  }
  if (std::abs(alpha - std::tanh(beta * M)) > 1e-12) {
    throw ValidationError("reduced state: alpha does not match tanh(beta M)");
  }
  for (int s : signs) {
    if (s != 1 && s != -1) throw ValidationError("reduced state: signs must be +1 or -1");
  }
}

Eigen::VectorXd consensus_closed_form(const Eigen::VectorXd& p0, const Eigen::VectorXd& lambdas,
                                      double t) {
  check_simplex(p0, "consensus_closed_form");
  check_lambdas(p0, lambdas, "consensus_closed_form");
  if (!(t >= 0.0)) throw ValidationError("consensus_closed_form: t must be non-negative");

  const Eigen::Index d = p0.size();
  Eigen::VectorXd log_w = Eigen::VectorXd::Constant(d, -std::numeric_limits<double>::infinity());
  for (Eigen::Index k = 0; k < d; ++k) {
    if (p0(k) > 0.0) log_w(k) = 2.0 * lambdas(k) * t + std::log(p0(k));
  }
  const double top = log_w.maxCoeff();
  Eigen::VectorXd p = Eigen::VectorXd::Zero(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    if (p0(k) > 0.0) p(k) = std::exp(log_w(k) - top);
  }
  return p / p.sum();
}

Eigen::VectorXd consensus_coefficients(const Eigen::VectorXd& c0, const Eigen::VectorXd& lambdas,
                                       double t) {
  const Eigen::VectorXd p = consensus_closed_form(c0.cwiseAbs2(), lambdas, t);
  Eigen::VectorXd c(c0.size());
  for (Eigen::Index k = 0; k < c0.size(); ++k) {
    const double sign = (c0(k) > 0.0) - (c0(k) < 0.0);
    c(k) = sign * std::sqrt(p(k));
  }
  return c;
}

Eigen::VectorXd consensus_field(const Eigen::VectorXd& p, const Eigen::VectorXd& lambdas) {
  check_lambdas(p, lambdas, "consensus_field");
  const double mean = lambdas.dot(p);
  return 2.0 * p.cwiseProduct((lambdas.array() - mean).matrix());
}

Eigen::VectorXd consensus_limit(const Eigen::VectorXd& p0, const Eigen::VectorXd& lambdas) {
  check_simplex(p0, "consensus_limit");
  check_lambdas(p0, lambdas, "consensus_limit");
  const auto support = support_of(p0);
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k : support) best = std::max(best, lambdas(k));
  std::vector<Eigen::Index> selected;
  return concentrate(p0, lambdas, support, best, selected);
}

BipolarRates bipolar_field(const ReducedState& state, const Eigen::VectorXd& lambdas,
                           double beta) {
  state.validate(lambdas, beta);
  const Eigen::ArrayXd gap = lambdas.array() - state.M;
  BipolarRates r;
  r.p_dot = (2.0 * state.alpha * state.p.array() * gap).matrix();
  r.M_dot = 2.0 * state.alpha * (state.p.array() * gap.square()).sum();
  r.M_dot_direct = lambdas.dot(r.p_dot);
  return r;
}

BipolarLimit bipolar_limit(const Eigen::VectorXd& p0, const Eigen::VectorXd& lambdas,
                           double /*beta*/) {
  check_simplex(p0, "bipolar_limit");
  check_lambdas(p0, lambdas, "bipolar_limit");
  BipolarLimit out;
  out.support = support_of(p0);
  out.lambda_plus = -std::numeric_limits<double>::infinity();
  out.lambda_minus = std::numeric_limits<double>::infinity();
  for (Eigen::Index k : out.support) {
    out.lambda_plus = std::max(out.lambda_plus, lambdas(k));
    out.lambda_minus = std::min(out.lambda_minus, lambdas(k));
  }
  const double m0 = lambdas.dot(p0);
  if (std::abs(m0) <= 1e-12) {
    out.regime = BipolarRegime::Stationary;
    out.p_limit = p0;
    out.M_limit = m0;
  } else if (m0 > 0.0) {
    out.regime = BipolarRegime::Increasing;
    out.p_limit = concentrate(p0, lambdas, out.support, out.lambda_plus, out.selected);
    out.M_limit = out.lambda_plus;
  } else {
    out.regime = BipolarRegime::Decreasing;
    out.p_limit = concentrate(p0, lambdas, out.support, out.lambda_minus, out.selected);
    out.M_limit = out.lambda_minus;
  }
  return out;
}

std::optional<BipolarProfile> check_bipolar_balance(const Configuration& cfg, double tol) {
  cfg.validate();
  const Eigen::Index n = cfg.n();
  if (n < 2 || n % 2 != 0) return std::nullopt;

  BipolarProfile out;
  out.u = cfg.states.row(0).transpose();
  out.signs.resize(static_cast<std::size_t>(n));
  int balance = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd xi = cfg.states.row(i).transpose();
    const int s = xi.dot(out.u) >= 0.0 ? 1 : -1;
    if ((xi - s * out.u).cwiseAbs().maxCoeff() > tol) return std::nullopt;
    out.signs[static_cast<std::size_t>(i)] = s;
    balance += s;
  }
  if (balance != 0) return std::nullopt;

  for (Eigen::Index k = 0; k < out.u.size(); ++k) {
    if (std::abs(out.u(k)) > tol) {
      if (out.u(k) < 0.0) {
        out.u = -out.u;
        for (int& s : out.signs) s = -s;
      }
      break;
    }
  }
  return out;
}

ReducedTrajectory integrate_consensus(const Eigen::VectorXd& p0, const Eigen::VectorXd& lambdas,
                                      const IntegrationOptions& opts) {
  check_simplex(p0, "integrate_consensus");
  check_lambdas(p0, lambdas, "integrate_consensus");
  return integrate_replicator(p0, lambdas, opts,
                              [&](const Eigen::VectorXd& p) { return consensus_field(p, lambdas); });
}

ReducedTrajectory integrate_bipolar(const Eigen::VectorXd& p0, const Eigen::VectorXd& lambdas,
                                    double beta, const IntegrationOptions& opts) {
  check_simplex(p0, "integrate_bipolar");
  check_lambdas(p0, lambdas, "integrate_bipolar");
  // Raw field: intermediate RK stages may leave the simplex by rounding.
  return integrate_replicator(p0, lambdas, opts, [&](const Eigen::VectorXd& p) {
    const double m = lambdas.dot(p);
    return Eigen::VectorXd(2.0 * std::tanh(beta * m) * p.array() * (lambdas.array() - m));
  });
}

}  // namespace sal
