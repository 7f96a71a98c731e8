#include <doctest.h>

#include "../oracles.hpp"
#include "sal/errors.hpp"
#include "sal/experiments.hpp"
#include "sal/selection.hpp"
#include "sal/spectral.hpp"

#include <cmath>
#include <string>

namespace {

sal::Spectrum diag_spectrum(std::vector<double> lambdas) { return sal::spectrum_from_diagonal(lambdas); }

}  // namespace

TEST_SUITE("selection") {

TEST_CASE("pairwise observables") {
  Eigen::MatrixXd x(3, 2);
  x << 1, 0, 0, 1, -1, 0;
  const auto obs = sal::pairwise_observables(x);
  CHECK(obs.rho_min == -1.0);
  CHECK(obs.rho_max == 0.0);
  CHECK(obs.rho_abs == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS((void)sal::pairwise_observables(x.topRows(1)), sal::ValidationError);
}

TEST_CASE("xi certificate values") {
  CHECK(sal::xi_certificate(1.0, 0.0) == 0.0);
  CHECK(sal::xi_certificate(2.0, 1.5) == doctest::Approx(2.25 * (std::cosh(2.0) + std::cosh(1.5)) -
                                                          3.0 * std::sinh(1.5)));
  for (double r : {0.01, 0.5, 3.0, 9.0}) {
    for (double t : {0.1, 1.0, 4.0, 10.0}) {
      CHECK(sal::xi_certificate(r, t) == sal::xi_certificate(r, -t));
      CHECK(sal::xi_certificate(r, t) >= 0.0);
    }
  }
  CHECK_THROWS_AS((void)sal::xi_certificate(0.0, 1.0), sal::ValidationError);
}

TEST_CASE("explicit rho derivative matches the dynamics and is non-positive") {
  std::mt19937_64 gen(81);
  const auto s = diag_spectrum({-0.5, -1.25, -2.0});
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::MatrixXd x = oracle::random_unit_rows(2, 3, gen);
    const double beta = 0.2 + 0.05 * trial;
    const auto d = sal::rho_derivative_explicit(x.row(0).transpose(), x.row(1).transpose(), s, beta);
    CHECK_FALSE(d.boundary);
    CHECK(d.rho_dot == doctest::Approx(d.rho_dot_dynamics).epsilon(1e-10).scale(1e-12));
    CHECK(d.rho_dot <= 1e-14);
    CHECK(d.E >= -1e-12);
    CHECK(d.xi >= 0.0);
    const Eigen::MatrixXd k = oracle::softmax_weights(x, s.matrix, beta);
    CHECK(d.eta_x == doctest::Approx(k(0, 0) - k(0, 1)));
  }
}

TEST_CASE("antipodal and coincident pairs are boundary cases") {
  const auto s = diag_spectrum({-0.5, -2.0});
  const Eigen::Vector2d x(0.6, 0.8);
  CHECK(sal::rho_derivative_explicit(x, -x, s, 1.0).boundary);
  CHECK(sal::rho_derivative_explicit(x, x, s, 1.0).boundary);
}

TEST_CASE("negative definiteness is required") {
  const auto s = diag_spectrum({0.1, -2.0});
  try {
    sal::require_negative_definite(s);
    FAIL("expected PreconditionError");
  } catch (const sal::PreconditionError& e) {
    CHECK(std::string(e.what()).find("lambda_1") != std::string::npos);
  }
}

TEST_CASE("two tokens separate onto the bottom mode") {
  const auto s = diag_spectrum({-0.5, -1.25, -2.0});
  std::mt19937_64 gen(82);
  const sal::Configuration cfg{oracle::random_unit_rows(2, 3, gen), 1.0};
  const auto traj = sal::integrate(cfg, s, {.t_end = 50.0, .dt = 1e-2, .record_every = 10});
  const auto rep = sal::two_particle_limit_check(traj, s);
  CHECK(rep.status == sal::TwoParticleStatus::Checked);
  CHECK(rep.worst_rho_increase <= 1e-10);
  CHECK(rep.terminal_rho < -1.0 + 1e-3);
  CHECK(rep.antipodal_on_bottom_mode);
}

TEST_CASE("exceptional two-token starts are reported") {
  const auto s = diag_spectrum({-0.5, -2.0});
  Eigen::MatrixXd same(2, 2), antipodal(2, 2);
  same << 0.6, 0.8, 0.6, 0.8;
  antipodal << 1, 0, -1, 0;
  const auto a = sal::integrate({same, 1.0}, s, {.t_end = 1.0, .dt = 0.1});
  CHECK(sal::two_particle_limit_check(a, s).status == sal::TwoParticleStatus::SkippedDiagonal);
  const auto b = sal::integrate({antipodal, 1.0}, s, {.t_end = 1.0, .dt = 0.1});
  const auto rep = sal::two_particle_limit_check(b, s);
  CHECK(rep.status == sal::TwoParticleStatus::ExceptionalStationary);
  CHECK(rep.terminal_rho == -1.0);
}

TEST_CASE("cone invariance and contraction for a dominant top eigenvalue") {
  const auto s = diag_spectrum({1.5, 0.5, -0.5});
  const auto cfg = sal::sample_initial({.kind = sal::Sampler::OneSidedCone, .delta = 0.1}, 20, s, 5);
  const auto traj = sal::integrate(cfg, s, {.t_end = 6.0, .dt = 1e-2, .record_every = 5});
  const auto diag = sal::cone_check(traj, s, 0.1);
  CHECK(diag.orientation == 1);
  CHECK(diag.min_c1_monotone());
  CHECK(diag.bound_holds());
  CHECK(diag.final_distance < 1e-2);
}

TEST_CASE("mirrored cone converges to -e_1") {
  const auto s = diag_spectrum({1.5, 0.5, -0.5});
  const auto cfg =
      sal::sample_initial({.kind = sal::Sampler::OneSidedCone, .delta = 0.1, .orientation = -1}, 10, s, 6);
  const auto traj = sal::integrate(cfg, s, {.t_end = 6.0, .dt = 1e-2, .record_every = 5});
  const auto diag = sal::cone_check(traj, s, 0.1);
  CHECK(diag.orientation == -1);
  CHECK(diag.min_c1_monotone());
  CHECK(diag.final_distance < 1e-2);
}

TEST_CASE("cone preconditions") {
  const auto dominant = diag_spectrum({1.5, 0.5, -0.5});
  const auto weak = diag_spectrum({1.0, 0.5, -1.2});
  Eigen::MatrixXd x(2, 3);
  x << 1, 0, 0, 0, 1, 0;
  const auto traj = sal::integrate({x, 1.0}, dominant, {.t_end = 0.0});
  CHECK_THROWS_AS((void)sal::cone_check(traj, dominant, 0.1), sal::PreconditionError);
  Eigen::MatrixXd y(2, 3);
  y << 1, 0, 0, 1, 0, 0;
  const auto ok = sal::integrate({y, 1.0}, weak, {.t_end = 0.0});
  try {
    (void)sal::cone_check(ok, weak, 0.1);
    FAIL("expected PreconditionError");
  } catch (const sal::PreconditionError& e) {
    CHECK(std::string(e.what()).find("|lambda_3|") != std::string::npos);
  }
  CHECK_THROWS_AS((void)sal::cone_check(ok, dominant, 1.5), sal::ValidationError);
}

}  // TEST_SUITE
