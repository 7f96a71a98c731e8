#include "sal/stability.hpp"

#include "sal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

namespace sal {

SignPattern SignPattern::parse(std::string_view text) {
  SignPattern out;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    if (token == "1" || token == "+1") {
      out.signs.push_back(1);
    } else if (token == "-1") {
      out.signs.push_back(-1);
    } else {
      throw ValidationError("sign pattern: unrecognized token '" + token + "'");
    }
    token.clear();
  };
  const bool numeric = text.find(',') != std::string_view::npos ||
                       text.find('1') != std::string_view::npos;
  for (char ch : text) {
    if (numeric) {
      if (ch == ',' || ch == ' ') {
        flush();
      } else {
        token.push_back(ch);
      }
    } else if (ch == '+') {
      out.signs.push_back(1);
    } else if (ch == '-') {
      out.signs.push_back(-1);
    } else if (ch != ' ') {
      throw ValidationError(std::string("sign pattern: unexpected character '") + ch + "'");
    }
  }
  flush();
  out.validate();
  return out;
}

SignPattern SignPattern::split(int n_plus, int n_minus) {
  if (n_plus < 0 || n_minus < 0 || n_plus + n_minus < 1) {
    throw ValidationError("sign pattern: group sizes must be non-negative with n >= 1");
  }
  SignPattern out;
  out.signs.assign(static_cast<std::size_t>(n_plus), 1);
  out.signs.insert(out.signs.end(), static_cast<std::size_t>(n_minus), -1);
  return out;
}

int SignPattern::n_plus() const {
  return static_cast<int>(std::count(signs.begin(), signs.end(), 1));
}

int SignPattern::n_minus() const {
  return static_cast<int>(std::count(signs.begin(), signs.end(), -1));
}

double SignPattern::ratio() const {
  if (n_minus() == 0) throw ValidationError("sign pattern: ratio needs n_- >= 1");
  return static_cast<double>(n_plus()) / static_cast<double>(n_minus());
}

void SignPattern::validate() const {
  if (signs.empty()) throw ValidationError("sign pattern: empty");
  for (int s : signs) {
    if (s != 1 && s != -1) throw ValidationError("sign pattern: entries must be +1 or -1");
  }
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Stable:
      return "stable";
    case Verdict::Unstable:
      return "unstable";
    case Verdict::Marginal:
      return "marginal";
  }
  return "unknown";
}

namespace {

void check_mode(Eigen::Index p, const Eigen::VectorXd& lambdas) {
  if (lambdas.size() < 2) throw ValidationError("stability: need d >= 2");
  if (!lambdas.allFinite()) throw ValidationError("stability: eigenvalues must be finite");
  if (p < 0 || p >= lambdas.size()) {
    std::ostringstream msg;
    msg << "stability: mode index " << p << " out of range [0, " << lambdas.size() << ")";
    throw ValidationError(msg.str());
  }
}

void check_beta(double beta) {
  if (!std::isfinite(beta) || beta <= 0.0) {
    throw ValidationError("stability: beta must be finite and positive");
  }
}

Verdict classify_rates(std::span<const double> rates) {
  bool marginal = false;
  for (double r : rates) {
    if (r > kMarginalBand) return Verdict::Unstable;
    if (std::abs(r) <= kMarginalBand) marginal = true;
  }
  return marginal ? Verdict::Marginal : Verdict::Stable;
}

struct GroupWeights {
  double a_plus, b_plus, a_minus, b_minus, gamma_plus, gamma_minus;
};

// Softmax entries within (a) and across (b) sign groups, scaled by the larger
// exponential so nothing overflows.
GroupWeights group_weights(double lp, double beta, double np, double nm) {
  const double x = beta * lp;
  const double big = std::abs(x);
  const double e_pos = std::exp(x - big);
  const double e_neg = std::exp(-x - big);
  const double z_plus = np * e_pos + nm * e_neg;
  const double z_minus = nm * e_pos + np * e_neg;
  GroupWeights w{};
  w.a_plus = e_pos / z_plus;
  w.b_plus = e_neg / z_plus;
  w.a_minus = e_pos / z_minus;
  w.b_minus = e_neg / z_minus;
  w.gamma_plus = lp * (np * w.a_plus - nm * w.b_plus);
  w.gamma_minus = lp * (nm * w.a_minus - np * w.b_minus);
  return w;
}

Eigen::Matrix2d block_matrix(const GroupWeights& w, double lk, double np, double nm) {
  Eigen::Matrix2d b;
  b << lk * np * w.a_plus - w.gamma_plus, lk * nm * w.b_plus,  //
      lk * np * w.b_minus, lk * nm * w.a_minus - w.gamma_minus;
  return b;
}

std::array<std::complex<double>, 2> eig2(double tr, double det) {
  const double half = 0.5 * tr;
  const double disc = half * half - det;
  if (disc >= 0.0) {
    const double root = std::sqrt(disc);
    const double q = half + std::copysign(root, half);
    if (q == 0.0) return {std::complex<double>(0.0), std::complex<double>(0.0)};
    return {std::complex<double>(q), std::complex<double>(det / q)};
  }
  const double im = std::sqrt(-disc);
  return {std::complex<double>(half, im), std::complex<double>(half, -im)};
}

}  // namespace

HomogeneousStability homogeneous_stability(Eigen::Index p, const Eigen::VectorXd& lambdas) {
  check_mode(p, lambdas);
  HomogeneousStability out;
  for (Eigen::Index k = 0; k < lambdas.size(); ++k) {
    if (k == p) continue;
    const double rate = lambdas(k) - lambdas(p);
    out.mean_rates.emplace_back(k, rate);
    out.rates.push_back(rate);
  }
  out.fluctuation_rate = -lambdas(p);
  out.rates.push_back(out.fluctuation_rate);
  out.verdict = classify_rates(out.rates);
  return out;
}

StabilityReport sign_split_report(Eigen::Index p, const Eigen::VectorXd& lambdas, double beta,
                                  const SignPattern& pattern) {
  check_mode(p, lambdas);
  check_beta(beta);
  pattern.validate();
  if (pattern.is_constant()) {
    throw ValidationError("sign_split_report: pattern must contain both signs");
  }

  StabilityReport r;
  r.mode = p;
  r.n_plus = pattern.n_plus();
  r.n_minus = pattern.n_minus();
  const double np = r.n_plus;
  const double nm = r.n_minus;
  const GroupWeights w = group_weights(lambdas(p), beta, np, nm);
  r.a_plus = w.a_plus;
  r.b_plus = w.b_plus;
  r.a_minus = w.a_minus;
  r.b_minus = w.b_minus;
  r.gamma_plus = w.gamma_plus;
  r.gamma_minus = w.gamma_minus;

  bool ok = r.gamma_plus > 0.0 && r.gamma_minus > 0.0;
  for (Eigen::Index k = 0; k < lambdas.size(); ++k) {
    if (k == p) continue;
    ModeBlock b;
    b.mode = k;
    b.matrix = block_matrix(w, lambdas(k), np, nm);
    b.trace = b.matrix.trace();
    b.det = b.matrix.determinant();
    b.eigenvalues = eig2(b.trace, b.det);
    ok = ok && b.trace < 0.0 && b.det > 0.0;
    r.blocks.push_back(b);
  }
  r.stable = ok;

  const auto values = expand(equilibrium_spectrum(p, lambdas, beta, pattern));
  r.spectral_verdict = classify(values);
  r.c_beta = std::exp(2.0 * beta * lambdas(p));
  r.threshold_sigma = sigma_threshold(2.0 * beta * lambdas(p), pattern.ratio());
  return r;
}

std::vector<SpectrumEntry> equilibrium_spectrum(Eigen::Index p, const Eigen::VectorXd& lambdas,
                                                double beta, const SignPattern& pattern) {
  check_mode(p, lambdas);
  pattern.validate();
  std::vector<SpectrumEntry> out;
  const int n = pattern.n();
  if (pattern.is_constant()) {
    for (Eigen::Index k = 0; k < lambdas.size(); ++k) {
      if (k == p) continue;
      out.push_back({lambdas(k) - lambdas(p), 1, k});
      if (n > 1) out.push_back({-lambdas(p), n - 1, k});
    }
    return out;
  }
  check_beta(beta);
  const int np = pattern.n_plus();
  const int nm = pattern.n_minus();
  const GroupWeights w = group_weights(lambdas(p), beta, np, nm);
  for (Eigen::Index k = 0; k < lambdas.size(); ++k) {
    if (k == p) continue;
    if (np > 1) out.push_back({-w.gamma_plus, np - 1, k});
    if (nm > 1) out.push_back({-w.gamma_minus, nm - 1, k});
    const Eigen::Matrix2d b = block_matrix(w, lambdas(k), np, nm);
    const auto mu = eig2(b.trace(), b.determinant());
    out.push_back({mu[0], 1, k});
    out.push_back({mu[1], 1, k});
  }
  return out;
}

std::vector<std::complex<double>> expand(std::span<const SpectrumEntry> entries) {
  std::vector<std::complex<double>> out;
  for (const auto& e : entries) out.insert(out.end(), static_cast<std::size_t>(e.multiplicity), e.value);
  return out;
}

Verdict classify(std::span<const std::complex<double>> eigenvalues) {
  std::vector<double> re;
  re.reserve(eigenvalues.size());
  for (const auto& z : eigenvalues) re.push_back(z.real());
  return classify_rates(re);
}

Configuration pure_mode_configuration(const Spectrum& s, Eigen::Index p,
                                      const SignPattern& pattern, double beta) {
  pattern.validate();
  if (p < 0 || p >= s.dim()) throw ValidationError("pure_mode_configuration: mode out of range");
  Configuration cfg{Eigen::MatrixXd(pattern.n(), s.dim()), beta};
  for (int i = 0; i < pattern.n(); ++i) {
    cfg.states.row(i) = pattern.signs[static_cast<std::size_t>(i)] * s.basis.col(p).transpose();
  }
  return cfg;
}

std::vector<std::complex<double>> jacobian_oracle(const Configuration& equilibrium,
                                                  const Spectrum& s, double beta, double h) {
  if (!(h >= 1e-7 && h <= 1e-4)) throw ValidationError("jacobian_oracle: h must lie in [1e-7, 1e-4]");
  equilibrium.validate();
  const Eigen::Index n = equilibrium.n();
  const Eigen::Index d = equilibrium.d();
  if (d != s.dim()) throw ValidationError("jacobian_oracle: dimension mismatch");
  if (d < 2) throw ValidationError("jacobian_oracle: need d >= 2");

  const Eigen::MatrixXd c = equilibrium.states * s.basis;
  Eigen::Index p = 0;
  c.row(0).cwiseAbs().maxCoeff(&p);
  std::vector<double> sign(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::RowVectorXd rest = c.row(i);
    rest(p) = 0.0;
    if (std::abs(std::abs(c(i, p)) - 1.0) > 1e-10 || rest.cwiseAbs().maxCoeff() > 1e-10) {
      std::ostringstream msg;
      msg << "jacobian_oracle: token " << i << " is not +-e_" << p;
      throw PreconditionError(msg.str());
    }
    sign[static_cast<std::size_t>(i)] = c(i, p) > 0.0 ? 1.0 : -1.0;
  }

  std::vector<Eigen::Index> tangent;
  for (Eigen::Index k = 0; k < d; ++k) {
    if (k != p) tangent.push_back(k);
  }
  const auto m = static_cast<Eigen::Index>(tangent.size());
  const Eigen::Index dim = n * m;
  Eigen::MatrixXd jac(dim, dim);

  Configuration base{Eigen::MatrixXd(n, d), beta};
  for (Eigen::Index i = 0; i < n; ++i) {
    base.states.row(i) = sign[static_cast<std::size_t>(i)] * s.basis.col(p).transpose();
  }
  auto tangent_components = [&](const Eigen::MatrixXd& field) {
    const Eigen::MatrixXd fc = field * s.basis;
    Eigen::VectorXd out(dim);
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index a = 0; a < m; ++a) out(j * m + a) = fc(j, tangent[static_cast<std::size_t>(a)]);
    }
    return out;
  };

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index a = 0; a < m; ++a) {
      const Eigen::RowVectorXd ek = s.basis.col(tangent[static_cast<std::size_t>(a)]).transpose();
      Configuration plus = base;
      Configuration minus = base;
      plus.states.row(i) = (base.states.row(i) + h * ek).normalized();
      minus.states.row(i) = (base.states.row(i) - h * ek).normalized();
      jac.col(i * m + a) = (tangent_components(vector_field(plus, s)) -
                            tangent_components(vector_field(minus, s))) /
                           (2.0 * h);
    }
  }

  Eigen::EigenSolver<Eigen::MatrixXd> solver(jac, false);
  if (solver.info() != Eigen::Success) throw NumericError("jacobian_oracle: eigen solver failed");
  const Eigen::VectorXcd ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double multiset_distance(std::span<const std::complex<double>> a,
                         std::span<const std::complex<double>> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  std::vector<bool> used(b.size(), false);
  // Pair the tightest matches first.
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  pairs.reserve(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) pairs.emplace_back(std::abs(a[i] - b[j]), i, j);
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<bool> taken(a.size(), false);
  double worst = 0.0;
  std::size_t matched = 0;
  for (const auto& [dist, i, j] : pairs) {
    if (taken[i] || used[j]) continue;
    taken[i] = true;
    used[j] = true;
    worst = std::max(worst, dist);
    if (++matched == a.size()) break;
  }
  return worst;
}

double sigma_threshold(double exponent, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw ValidationError("sigma: r must be positive and finite");
  if (std::isnan(exponent)) throw ValidationError("sigma: exponent is NaN");
  if (exponent == 0.0) {
    if (r == 1.0) return 0.0;
    return -std::numeric_limits<double>::infinity();
  }
  if (exponent < 0.0) return -sigma_threshold(-exponent, r);
  // With q = e^{-x}: sigma = (1 - r q)(r - q) / (r (1 - q^2)).
  const double em1 = std::expm1(-exponent);  // q - 1
  const double one_minus_rq = (1.0 - r) - r * em1;
  const double r_minus_q = (r - 1.0) - em1;
  const double one_minus_q2 = -std::expm1(-2.0 * exponent);
  return one_minus_rq * r_minus_q / (r * one_minus_q2);
}

std::vector<ThresholdPoint> threshold_curve(double lambda_p, double r,
                                            std::span<const double> beta_grid) {
  if (!std::isfinite(lambda_p) || lambda_p == 0.0) {
    throw ValidationError("threshold_curve: lambda_p must be finite and non-zero");
  }
  if (!(r > 0.0) || !std::isfinite(r)) throw ValidationError("threshold_curve: r must be positive");
  for (double b : beta_grid) {
    if (!std::isfinite(b) || b < 0.0) {
      throw ValidationError("threshold_curve: beta values must be finite and non-negative");
    }
  }
  const double endpoint = std::abs(std::log(r)) / (2.0 * std::abs(lambda_p));
  std::vector<double> betas(beta_grid.begin(), beta_grid.end());
  auto near_endpoint = [&](double b) {
    return std::abs(b - endpoint) <= 1e-12 * std::max(1.0, endpoint);
  };
  if (std::none_of(betas.begin(), betas.end(), near_endpoint)) betas.push_back(endpoint);
  std::sort(betas.begin(), betas.end());

  std::vector<ThresholdPoint> out;
  out.reserve(betas.size());
  for (double b : betas) {
    ThresholdPoint pt;
    pt.beta = b;
    pt.is_endpoint = near_endpoint(b);
    if (pt.is_endpoint) {
      pt.sigma_bound = 0.0;
      pt.note = r == 1.0 ? "endpoint (limit beta -> 0)" : "endpoint";
    } else {
      pt.sigma_bound = lambda_p * sigma_threshold(2.0 * b * lambda_p, r);
      if (b == 0.0) pt.note = "one-sided limit beta -> 0+";
    }
    out.push_back(std::move(pt));
  }
  return out;
}

}  // namespace sal
