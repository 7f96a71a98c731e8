#include "sal/verify.hpp"

#include "sal/errors.hpp"
#include "sal/experiments.hpp"
#include "sal/reduced.hpp"
#include "sal/rng.hpp"
#include "sal/selection.hpp"
#include "sal/spectral.hpp"
#include "sal/stability.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace sal::verify {

double CheckResult::metric(std::string_view name) const {
  for (const auto& [k, v] : metrics) {
    if (k == name) return v;
  }
  throw ValidationError("no metric '" + std::string(name) + "' in " + id);
}

double energy_drop(const TrajectoryRecord& rec) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < rec.energies.size(); ++k) {
    const double prev = rec.energies[k - 1];
    const double next = rec.energies[k];
    if (std::isnan(prev) || std::isnan(next)) continue;
    worst = std::max(worst, (prev - next) / std::max(1.0, std::abs(prev)));
  }
  return worst;
}

Eigen::MatrixXd random_orthogonal(Eigen::Index d, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd g(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) g(i, k) = rng.normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return qr.householderQ();
}

namespace {

class Stopwatch {
 public:
  [[nodiscard]] double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

Eigen::Index uniform_index(Rng& rng, Eigen::Index lo, Eigen::Index hi) {
  const auto span = static_cast<double>(hi - lo + 1);
  return std::min(hi, lo + static_cast<Eigen::Index>(rng.uniform() * span));
}

Eigen::VectorXd uniform_vector(Rng& rng, Eigen::Index d, double lo, double hi) {
  Eigen::VectorXd v(d);
  for (Eigen::Index k = 0; k < d; ++k) v(k) = uniform(rng, lo, hi);
  return v;
}

Spectrum rotated_spectrum(const Eigen::VectorXd& lambdas, std::uint64_t seed) {
  const Eigen::MatrixXd q = random_orthogonal(lambdas.size(), seed);
  Eigen::MatrixXd v = q * lambdas.asDiagonal() * q.transpose();
  v = 0.5 * (v + v.transpose());
  return decompose_symmetric(v);
}

Spectrum diagonal_spectrum(const Eigen::VectorXd& lambdas) {
  return spectrum_from_diagonal(std::span<const double>(lambdas.data(), static_cast<std::size_t>(lambdas.size())));
}

void track_energy(CheckResult& res, const TrajectoryRecord& rec) {
  res.worst_energy_drop =
      std::max({res.worst_energy_drop, energy_drop(rec), rec.worst_step_energy_drop});
  ++res.trajectories;
}

Configuration replicate(const Eigen::VectorXd& x, Eigen::Index n, double beta) {
  Configuration cfg{Eigen::MatrixXd(n, x.size()), beta};
  cfg.states.rowwise() = x.transpose();
  return cfg;
}

std::string summarize(const CheckResult& r) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [k, v] : r.metrics) {
    out << (first ? "" : ", ") << k << "=" << v;
    first = false;
  }
  return out.str();
}

void finish(CheckResult& res, const Stopwatch& clock, bool passed) {
  res.passed = passed;
  res.seconds = clock.seconds();
  if (res.trajectories > 0) res.metric("worst_energy_drop", res.worst_energy_drop);
  res.detail = summarize(res);
}

}  // namespace

CheckResult consensus_closed_form(const ConsensusParams& p) {
  const Stopwatch clock;
  CheckResult res;
  res.id = "consensus-closed-form";
  double worst_rel = 0.0;
  double worst_abs = 0.0;
  double worst_spread = 0.0;
  for (int k = 0; k < p.seeds; ++k) {
    Rng rng(trial_seed(p.seed, static_cast<std::uint64_t>(k)));
    const Eigen::Index d = uniform_index(rng, p.d_min, p.d_max);
    const Spectrum s = rotated_spectrum(uniform_vector(rng, d, -2.0, 2.0), rng.next_u64());
    const Eigen::VectorXd x = rng.unit_vector(d);
    const TrajectoryRecord rec =
        integrate(replicate(x, p.n, 1.0), s, {.t_end = p.t_end, .dt = p.dt, .record_every = p.record_every});
    track_energy(res, rec);

    const Eigen::VectorXd p0 = (s.basis.transpose() * x).cwiseAbs2();
    for (std::size_t r = 0; r < rec.size(); ++r) {
      const Eigen::MatrixXd& xs = rec.states[r];
      worst_spread = std::max(worst_spread, (xs.rowwise() - xs.row(0)).cwiseAbs().maxCoeff());
      const Eigen::VectorXd num = (s.basis.transpose() * xs.row(0).transpose()).cwiseAbs2();
      const Eigen::VectorXd exact = sal::consensus_closed_form(p0, s.eigenvalues, rec.times[r]);
      for (Eigen::Index m = 0; m < d; ++m) {
        if (p0(m) <= kReducedSupportThreshold) continue;
        const double err = std::abs(num(m) - exact(m));
        if (exact(m) >= p.relative_floor) {
          worst_rel = std::max(worst_rel, err / exact(m));
        } else {
          worst_abs = std::max(worst_abs, err);
        }
      }
      if (r + 1 == rec.size()) {
        for (Eigen::Index m = 0; m < d; ++m) res.observables.push_back(num(m));
      }
    }
  }
  res.metric("worst_relative_error", worst_rel);
  res.metric("worst_absolute_error_below_floor", worst_abs);
  res.metric("worst_consensus_spread", worst_spread);
  finish(res, clock, worst_rel <= p.tol && worst_abs <= p.abs_tol && worst_spread <= 1e-12);
  return res;
}

CheckResult consensus_selection(const SelectionParams& p) {
  const Stopwatch clock;
  CheckResult res;
  res.id = "consensus-selection";
  double worst = 0.0;
  for (int k = 0; k < p.seeds; ++k) {
    Rng rng(trial_seed(p.seed, static_cast<std::uint64_t>(k)));
    const Eigen::Index d = uniform_index(rng, std::max<Eigen::Index>(p.d_min, 3), p.d_max);
    // Odd seeds remove the top mode from the initial support.
    const bool restricted = k % 2 == 1;
    Eigen::VectorXd lambdas;
    for (int attempt = 0;; ++attempt) {
      if (attempt > 10000) throw NumericError("consensus-selection: cannot draw a gapped spectrum");
      lambdas = uniform_vector(rng, d, -2.0, 2.0);
      std::vector<double> sorted(lambdas.data(), lambdas.data() + d);
      std::sort(sorted.rbegin(), sorted.rend());
      const std::size_t top = restricted ? 1 : 0;
      if (sorted[top] - sorted[top + 1] >= p.min_gap) break;
    }
    Spectrum s = restricted ? diagonal_spectrum(lambdas) : rotated_spectrum(lambdas, rng.next_u64());
    Eigen::VectorXd x = rng.unit_vector(d);
    if (restricted) {
      x(0) = 0.0;  // diagonal spectrum is sorted: column 0 is the top mode
      x = s.basis * x;
      x.normalize();
    }
    const TrajectoryRecord rec =
        integrate(replicate(x, p.n, 1.0), s, {.t_end = p.t_end, .dt = p.dt, .record_every = 100});
    track_energy(res, rec);
    const Eigen::VectorXd p0 = (s.basis.transpose() * x).cwiseAbs2();
    const Eigen::VectorXd limit = consensus_limit(p0, s.eigenvalues);
    const Eigen::VectorXd num =
        (s.basis.transpose() * rec.final_states().row(0).transpose()).cwiseAbs2();
    worst = std::max(worst, (num - limit).cwiseAbs().maxCoeff());
    for (Eigen::Index m = 0; m < d; ++m) res.observables.push_back(num(m));
  }
  res.metric("worst_limit_error", worst);
  finish(res, clock, worst <= p.tol);
  return res;
}

CheckResult bipolar_reduction(const BipolarParams& p) {
  const Stopwatch clock;
  CheckResult res;
  res.id = "bipolar-M";
  double worst_p = 0.0;
  double worst_monotone = 0.0;
  double worst_limit = 0.0;
  int sign_flips = 0;
  int balance_lost = 0;
  int trial = 0;
  for (const Eigen::Index n : p.n_values) {
    if (n < 2 || n % 2 != 0) throw ValidationError("bipolar-M: n must be even and >= 2");
    for (int k = 0; k < p.trials_per_n; ++k, ++trial) {
      Rng rng(trial_seed(p.seed, static_cast<std::uint64_t>(trial)));
      const Eigen::Index d = uniform_index(rng, 2, 5);
      Eigen::VectorXd lambdas;
      Eigen::VectorXd c;
      // Keep runs where the selected extreme is well separated so the
      // limit is reached by t_end.
      for (int attempt = 0;; ++attempt) {
        if (attempt > 10000) throw NumericError("bipolar-M: cannot draw a separated instance");
        lambdas = uniform_vector(rng, d, -2.0, 2.0);
        c = rng.unit_vector(d);
        const double m0 = lambdas.dot(c.cwiseAbs2());
        if (std::abs(m0) < 0.2) continue;
        std::vector<double> sorted(lambdas.data(), lambdas.data() + d);
        std::sort(sorted.begin(), sorted.end());
        const double extreme = m0 > 0 ? sorted[d - 1] : sorted[0];
        const double next = m0 > 0 ? sorted[d - 2] : sorted[1];
        if (std::abs(extreme) >= 1.0 && std::abs(extreme - next) >= 0.5) break;
      }
      const Spectrum s = rotated_spectrum(lambdas, rng.next_u64());
      // c was drawn against the unsorted lambdas; realign with the spectrum.
      Eigen::VectorXd c_sorted(d);
      {
        std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
        for (Eigen::Index m = 0; m < d; ++m) order[static_cast<std::size_t>(m)] = m;
        std::stable_sort(order.begin(), order.end(),
                         [&](Eigen::Index a, Eigen::Index b) { return lambdas(a) > lambdas(b); });
        for (Eigen::Index m = 0; m < d; ++m) c_sorted(m) = c(order[static_cast<std::size_t>(m)]);
      }
      const Eigen::VectorXd u = (s.basis * c_sorted).normalized();
      Configuration cfg{Eigen::MatrixXd(n, d), p.beta};
      cfg.states.topRows(n / 2).rowwise() = u.transpose();
      cfg.states.bottomRows(n / 2).rowwise() = -u.transpose();

      const IntegrationOptions opts{.t_end = p.t_end, .dt = p.dt, .record_every = p.record_every};
      const TrajectoryRecord rec = integrate(cfg, s, opts);
      track_energy(res, rec);
      const Eigen::VectorXd p0 = (s.basis.transpose() * u).cwiseAbs2();
      const ReducedTrajectory red = integrate_bipolar(p0, s.eigenvalues, p.beta, opts);
      if (red.times.size() != rec.size()) throw NumericError("bipolar-M: record grids differ");

      const double m0 = s.eigenvalues.dot(p0);
      const double dir = m0 > 0 ? 1.0 : -1.0;
      double prev_m = m0;
      Eigen::VectorXd last;
      for (std::size_t r = 0; r < rec.size(); ++r) {
        const Configuration snap = rec.snapshot(r);
        if (!check_bipolar_balance(snap, 1e-8)) ++balance_lost;
        const Eigen::VectorXd pr = (s.basis.transpose() * snap.states.row(0).transpose()).cwiseAbs2();
        worst_p = std::max(worst_p, (pr - red.p[r]).cwiseAbs().maxCoeff());
        const double m = s.eigenvalues.dot(pr);
        worst_monotone = std::max(worst_monotone, dir * (prev_m - m));
        if (dir * m <= 0.0) ++sign_flips;
        prev_m = m;
        last = pr;
      }
      const BipolarLimit lim = bipolar_limit(p0, s.eigenvalues, p.beta);
      worst_limit = std::max(worst_limit, (last - lim.p_limit).cwiseAbs().maxCoeff());
      worst_limit = std::max(worst_limit, std::abs(s.eigenvalues.dot(last) - lim.M_limit));
      for (Eigen::Index m = 0; m < d; ++m) res.observables.push_back(last(m));
      res.observables.push_back(prev_m);
    }
  }
  res.metric("worst_p_gap", worst_p);
  res.metric("worst_M_reversal", worst_monotone);
  res.metric("sign_flips", sign_flips);
  res.metric("balance_lost", balance_lost);
  res.metric("worst_limit_error", worst_limit);
  finish(res, clock,
         worst_p <= p.tol_p && worst_monotone <= p.tol_monotone && sign_flips == 0 &&
             balance_lost == 0 && worst_limit <= p.tol_limit);
  return res;
}

CheckResult spectrum_oracle(const OracleParams& p) {
  const Stopwatch clock;
  CheckResult res;
  res.id = "spectrum-oracle";
  const double tol = std::max(p.tol, 10.0 * p.h * p.h);
  double worst = 0.0;
  int inconsistent = 0;
  int sign_split = 0;
  for (int k = 0; k < p.trials; ++k) {
    Rng rng(trial_seed(p.seed, static_cast<std::uint64_t>(k)));
    const Eigen::Index d = uniform_index(rng, 2, p.d_max);
    const Eigen::Index n = uniform_index(rng, 1, p.n_max);
    SignPattern pattern;
    for (Eigen::Index i = 0; i < n; ++i) pattern.signs.push_back(rng.uniform() < 0.5 ? 1 : -1);
    const Eigen::VectorXd lambdas = uniform_vector(rng, d, -2.0, 2.0);
    const double beta = uniform(rng, 0.1, 3.0);
    const Eigen::Index mode = uniform_index(rng, 0, d - 1);
    const Spectrum s = rng.uniform() < 0.5 ? rotated_spectrum(lambdas, rng.next_u64())
                                           : diagonal_spectrum(lambdas);

    const Configuration eq = pure_mode_configuration(s, mode, pattern, beta);
    const auto numeric = jacobian_oracle(eq, s, beta, p.h);
    const auto analytic = expand(equilibrium_spectrum(mode, s.eigenvalues, beta, pattern));
    worst = std::max(worst, multiset_distance(numeric, analytic));

    if (!pattern.is_constant()) {
      ++sign_split;
      if (pattern.n_plus() >= 2 && pattern.n_minus() >= 2) {
        const StabilityReport rep = sign_split_report(mode, s.eigenvalues, beta, pattern);
        const bool all_negative = std::all_of(analytic.begin(), analytic.end(),
                                              [](const auto& z) { return z.real() < -1e-10; });
        if (rep.stable != all_negative) ++inconsistent;
      }
    }
  }
  res.metric("worst_multiset_distance", worst);
  res.metric("tolerance", tol);
  res.metric("sign_split_instances", sign_split);
  res.metric("predicate_mismatches", inconsistent);
  finish(res, clock, worst <= tol && inconsistent == 0);
  return res;
}

CheckResult threshold_sharpness(const ThresholdParams& p) {
  const Stopwatch clock;
  CheckResult res;
  res.id = "threshold";
  int bad_brackets = 0;
  int bad_flip_counts = 0;
  int cases = 0;
  double worst_endpoint = 0.0;
  for (const double r : p.ratios) {
    const int n_minus = 2;
    const int n_plus = static_cast<int>(std::lround(r * n_minus));
    const SignPattern pattern = SignPattern::split(n_plus, n_minus);
    const double ratio = pattern.ratio();
    const double endpoint = std::abs(std::log(ratio)) / (2.0 * p.lambda_p);
    const std::vector<double> at_endpoint{endpoint};
    const auto curve = threshold_curve(p.lambda_p, ratio, at_endpoint);
    for (const auto& pt : curve) {
      if (pt.is_endpoint) {
        // Evaluate the formula itself, not the flagged value.
        const double raw = endpoint > 0.0 ? sigma_threshold(2.0 * endpoint * p.lambda_p, ratio) : 0.0;
        worst_endpoint = std::max(worst_endpoint, std::abs(raw));
      }
    }
    for (const double offset : p.beta_offsets) {
      ++cases;
      const double beta = endpoint + offset;
      const double bound = p.lambda_p * sigma_threshold(2.0 * beta * p.lambda_p, ratio);
      auto predicate = [&](double lk) {
        Eigen::Vector2d lambdas(p.lambda_p, lk);
        return sign_split_report(0, lambdas, beta, pattern).stable;
      };
      if (!predicate(bound - p.bracket) || predicate(bound + p.bracket)) ++bad_brackets;
      // Sweep transverse eigenvalues below lambda_p.
      constexpr int kSweep = 2001;
      const double lo = -3.0;
      const double hi = p.lambda_p - 1e-6;
      int flips = 0;
      bool prev = predicate(lo);
      for (int i = 1; i < kSweep; ++i) {
        const double lk = lo + (hi - lo) * i / (kSweep - 1.0);
        const bool now = predicate(lk);
        flips += now != prev;
        prev = now;
      }
      if (flips != 1) ++bad_flip_counts;
    }
  }
  double worst_tanh = 0.0;
  for (int i = 0; i <= 300; ++i) {
    const double beta = 3.0 * i / 300.0;
    worst_tanh = std::max(worst_tanh, std::abs(sigma_threshold(2.0 * beta, 1.0) - std::tanh(beta)));
  }
  res.metric("cases", cases);
  res.metric("bad_brackets", bad_brackets);
  res.metric("bad_flip_counts", bad_flip_counts);
  res.metric("worst_endpoint_sigma", worst_endpoint);
  res.metric("worst_tanh_error", worst_tanh);
  finish(res, clock,
         bad_brackets == 0 && bad_flip_counts == 0 && worst_endpoint <= 1e-10 &&
             worst_tanh <= p.tanh_tol);
  return res;
}

CheckResult cone(const ConeParams& p) {
  const Stopwatch clock;
  CheckResult res;
  res.id = "cone";
  const Eigen::VectorXd lambdas =
      Eigen::Map<const Eigen::VectorXd>(p.lambdas.data(), static_cast<Eigen::Index>(p.lambdas.size()));
  const Spectrum s = rotated_spectrum(lambdas, p.seed);
  double worst_drop = -std::numeric_limits<double>::infinity();
  double worst_excess = -std::numeric_limits<double>::infinity();
  double worst_distance = 0.0;
  for (int k = 0; k < p.trials; ++k) {
    const SamplerOptions sampler{.kind = Sampler::OneSidedCone, .delta = p.delta};
    const Configuration cfg =
        sample_initial(sampler, p.n, s, trial_seed(p.seed, static_cast<std::uint64_t>(k)), p.beta);
    const TrajectoryRecord rec =
        integrate(cfg, s, {.t_end = p.t_end, .dt = p.dt, .record_every = p.record_every});
    if (rec.aborted) throw NumericError("cone: trajectory aborted: " + rec.abort_reason);
    track_energy(res, rec);
    const ConeDiagnostics diag = cone_check(rec, s, p.delta);
    worst_drop = std::max(worst_drop, diag.worst_min_c1_drop);
    worst_excess = std::max(worst_excess, diag.worst_bound_excess);
    worst_distance = std::max(worst_distance, diag.final_distance);
    res.observables.push_back(diag.min_c1.back());
    for (Eigen::Index m = 0; m < diag.ratios.cols(); ++m) {
      res.observables.push_back(diag.ratios(diag.ratios.rows() - 1, m));
    }
    res.observables.push_back(diag.final_distance);
  }
  res.metric("worst_min_c1_drop", worst_drop);
  res.metric("worst_bound_excess", worst_excess);
  res.metric("worst_final_distance", worst_distance);
  finish(res, clock,
         worst_drop <= p.tol && worst_excess <= p.tol && worst_distance < p.terminal_tol);
  return res;
}

CheckResult rho_monotone(const TwoParticleParams& p) {
  const Stopwatch clock;
  CheckResult res;
  res.id = "rho-monotone";
  double worst_gap = 0.0;
  double max_rho_dot = -std::numeric_limits<double>::infinity();
  double worst_eta = 0.0;
  double worst_form = 0.0;
  for (int k = 0; k < p.samples; ++k) {
    Rng rng(trial_seed(p.seed, static_cast<std::uint64_t>(k)));
    const Eigen::Index d = uniform_index(rng, 2, 6);
    const Spectrum s = rotated_spectrum(uniform_vector(rng, d, -3.0, -0.1), rng.next_u64());
    const double beta = uniform(rng, 0.1, 5.0);
    const Eigen::VectorXd x1 = rng.unit_vector(d);
    const Eigen::VectorXd x2 = rng.unit_vector(d);
    const TwoParticleDerivative r = rho_derivative_explicit(x1, x2, s, beta);
    if (r.boundary) continue;
    worst_gap = std::max(worst_gap, std::abs(r.rho_dot - r.rho_dot_dynamics));
    max_rho_dot = std::max(max_rho_dot, r.rho_dot);
    worst_eta = std::max(worst_eta, std::abs(r.eta_x + std::tanh(beta * (r.C + r.D) / 4.0)));
    worst_eta = std::max(worst_eta, std::abs(r.eta_y - std::tanh(beta * (r.D - r.C) / 4.0)));
    worst_form = std::max({worst_form, -r.A, -r.D, r.C * r.C - r.A * r.D - 1e-12});
  }

  const Eigen::VectorXd lambdas =
      Eigen::Map<const Eigen::VectorXd>(p.lambdas.data(), static_cast<Eigen::Index>(p.lambdas.size()));
  const Spectrum s = rotated_spectrum(lambdas, p.seed);
  const Eigen::Index bottom = s.dim() - 1;
  double worst_increase = 0.0;
  double worst_rho_T = -1.0;
  double worst_md = 1.0;
  int not_checked = 0;
  for (int k = 0; k < p.trials; ++k) {
    const Configuration cfg =
        sample_initial({.kind = Sampler::UniformSphere}, 2, s,
                       trial_seed(p.seed + 1000003, static_cast<std::uint64_t>(k)), p.beta);
    const TrajectoryRecord rec =
        integrate(cfg, s, {.t_end = p.t_end, .dt = p.dt, .record_every = p.record_every});
    if (rec.aborted) throw NumericError("rho-monotone: trajectory aborted: " + rec.abort_reason);
    track_energy(res, rec);
    const TwoParticleReport rep = two_particle_limit_check(rec, s, p.terminal_tol);
    if (rep.status != TwoParticleStatus::Checked) ++not_checked;
    worst_increase = std::max(worst_increase, rep.worst_rho_increase);
    worst_rho_T = std::max(worst_rho_T, rep.terminal_rho);
    const double md = (rec.final_states() * s.basis.col(bottom)).cwiseAbs2().mean();
    worst_md = std::min(worst_md, md);
    res.observables.push_back(rep.terminal_rho);
    res.observables.push_back(md);
  }
  res.metric("worst_explicit_gap", worst_gap);
  res.metric("max_rho_dot", max_rho_dot);
  res.metric("worst_eta_identity", worst_eta);
  res.metric("worst_form_violation", worst_form);
  res.metric("worst_rho_increase", worst_increase);
  res.metric("worst_terminal_rho", worst_rho_T);
  res.metric("worst_terminal_m_d", worst_md);
  res.metric("not_checked", not_checked);
  finish(res, clock,
         worst_gap <= p.tol && max_rho_dot < 0.0 && worst_eta <= 1e-12 && worst_form <= 0.0 &&
             worst_increase <= p.tol && worst_rho_T < -1.0 + p.terminal_tol &&
             worst_md > 1.0 - p.terminal_tol && not_checked == 0);
  return res;
}

CheckResult xi_grid(const XiParams& p) {
  const Stopwatch clock;
  CheckResult res;
  res.id = "xi";
  double min_value = std::numeric_limits<double>::infinity();
  int zero_off_axis = 0;
  int points = 0;
  for (int i = 1; i <= p.r_points; ++i) {
    const double r = p.r_max * i / p.r_points;
    for (int j = 0; j < p.t_points; ++j) {
      const double t = -p.t_max + 2.0 * p.t_max * j / (p.t_points - 1.0);
      const double xi = xi_certificate(r, t);
      ++points;
      min_value = std::min(min_value, xi);
      if (t != 0.0 && xi <= 0.0) ++zero_off_axis;
    }
  }
  res.metric("points", points);
  res.metric("min_xi", min_value);
  res.metric("nonpositive_off_axis", zero_off_axis);
  finish(res, clock, min_value >= -1e-12 && zero_off_axis == 0);
  return res;
}

const std::vector<std::string>& suite_ids() {
  static const std::vector<std::string> ids = {
      "consensus-closed-form", "consensus-selection", "bipolar-M", "spectrum-oracle",
      "threshold",             "cone",                "rho-monotone", "xi"};
  return ids;
}

CheckResult run_suite(std::string_view id, const SuiteOverrides& o) {
  if (id == "consensus-closed-form") {
    ConsensusParams p;
    p.seeds = o.trials.value_or(p.seeds);
    p.n = o.n.value_or(p.n);
    p.dt = o.dt.value_or(p.dt);
    p.t_end = o.t_end.value_or(p.t_end);
    p.seed = o.seed.value_or(p.seed);
    return consensus_closed_form(p);
  }
  if (id == "consensus-selection") {
    SelectionParams p;
    p.seeds = o.trials.value_or(p.seeds);
    p.n = o.n.value_or(p.n);
    p.dt = o.dt.value_or(p.dt);
    p.t_end = o.t_end.value_or(p.t_end);
    p.seed = o.seed.value_or(p.seed);
    return consensus_selection(p);
  }
  if (id == "bipolar-M") {
    BipolarParams p;
    if (o.n) p.n_values = {*o.n};
    p.trials_per_n = o.trials.value_or(p.trials_per_n);
    p.beta = o.beta.value_or(p.beta);
    p.dt = o.dt.value_or(p.dt);
    p.t_end = o.t_end.value_or(p.t_end);
    p.seed = o.seed.value_or(p.seed);
    return bipolar_reduction(p);
  }
  if (id == "spectrum-oracle") {
    OracleParams p;
    p.trials = o.trials.value_or(p.trials);
    p.seed = o.seed.value_or(p.seed);
    return spectrum_oracle(p);
  }
  if (id == "threshold") return threshold_sharpness({});
  if (id == "cone") {
    ConeParams p;
    p.n = o.n.value_or(p.n);
    p.beta = o.beta.value_or(p.beta);
    p.delta = o.delta.value_or(p.delta);
    p.trials = o.trials.value_or(p.trials);
    p.dt = o.dt.value_or(p.dt);
    p.t_end = o.t_end.value_or(p.t_end);
    p.seed = o.seed.value_or(p.seed);
    return cone(p);
  }
  if (id == "rho-monotone") {
    TwoParticleParams p;
    p.samples = o.trials.value_or(p.samples);
    p.beta = o.beta.value_or(p.beta);
    p.dt = o.dt.value_or(p.dt);
    p.t_end = o.t_end.value_or(p.t_end);
    p.seed = o.seed.value_or(p.seed);
    return rho_monotone(p);
  }
  if (id == "xi") return xi_grid({});
  std::string list;
  for (const auto& s : suite_ids()) list += (list.empty() ? "" : ", ") + s;
  throw ValidationError("unknown verification suite '" + std::string(id) + "' (known: " + list + ")");
}

}  // namespace sal::verify
