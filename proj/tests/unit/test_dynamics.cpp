#include <doctest.h>

#include "../oracles.hpp"
#include "sal/dynamics.hpp"
#include "sal/errors.hpp"
#include "sal/spectral.hpp"

#include <cmath>
#include <limits>

using sal::Configuration;

namespace {

struct Fixture {
  Eigen::MatrixXd v;
  sal::Spectrum s;
  Configuration cfg;
};

Fixture random_fixture(std::uint64_t seed, Eigen::Index n, Eigen::Index d, double beta) {
  std::mt19937_64 gen(seed);
  Fixture f;
  f.v = oracle::random_symmetric(d, gen);
  f.s = sal::decompose_symmetric(f.v);
  f.cfg = {oracle::random_unit_rows(n, d, gen), beta};
  return f;
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("vector field matches the naive evaluation") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto f = random_fixture(seed, 2 + seed % 7, 2 + seed % 5, 0.1 + 0.3 * seed);
    const Eigen::MatrixXd got = sal::vector_field(f.cfg, f.s);
    const Eigen::MatrixXd want = oracle::vector_field(f.cfg.states, f.v, f.cfg.beta);
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("attention weights are row-stochastic and match the naive softmax") {
  const auto f = random_fixture(31, 9, 4, 2.5);
  const auto k = sal::attention_weights(f.cfg, f.s);
  CHECK((k.weights.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-14);
  CHECK((k.weights - oracle::softmax_weights(f.cfg.states, f.v, f.cfg.beta)).cwiseAbs().maxCoeff() <
        1e-14);
  CHECK(k.weights.minCoeff() >= 0.0);
}

TEST_CASE("field is tangent to the sphere") {
  const auto f = random_fixture(32, 12, 6, 1.7);
  const Eigen::MatrixXd vf = sal::vector_field(f.cfg, f.s);
  for (Eigen::Index i = 0; i < f.cfg.n(); ++i) CHECK(std::abs(vf.row(i).dot(f.cfg.states.row(i))) < 1e-14);
}

TEST_CASE("large beta stays finite") {
  auto f = random_fixture(33, 10, 3, 500.0);
  const Eigen::MatrixXd vf = sal::vector_field(f.cfg, f.s);
  CHECK(vf.allFinite());
  const auto k = sal::attention_weights(f.cfg, f.s);
  CHECK((k.weights.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-14);
}

TEST_CASE("beta zero averages uniformly") {
  auto f = random_fixture(34, 5, 3, 0.0);
  const auto k = sal::attention_weights(f.cfg, f.s);
  CHECK((k.weights.array() - 0.2).abs().maxCoeff() < 1e-15);
}

TEST_CASE("energy matches the naive sum") {
  const auto f = random_fixture(35, 7, 4, 1.3);
  CHECK(sal::energy(f.cfg, f.s) == doctest::Approx(oracle::energy(f.cfg.states, f.v, 1.3)).epsilon(1e-13));
  Configuration zero = f.cfg;
  zero.beta = 0.0;
  CHECK_THROWS_AS((void)sal::energy(zero, f.s), sal::ValidationError);
}

TEST_CASE("energy rate along the field equals sum Z_i |v_i|^2") {
  const auto f = random_fixture(36, 6, 3, 0.8);
  const Eigen::MatrixXd vf = sal::vector_field(f.cfg, f.s);
  const auto k = sal::attention_weights(f.cfg, f.s);
  double predicted = 0.0;
  for (Eigen::Index i = 0; i < f.cfg.n(); ++i) predicted += std::exp(k.row_log_norms(i)) * vf.row(i).squaredNorm();
  const double h = 1e-6;
  const double fd = (oracle::energy(f.cfg.states + h * vf, f.v, 0.8) -
                     oracle::energy(f.cfg.states - h * vf, f.v, 0.8)) /
                    (2.0 * h);
  CHECK(fd == doctest::Approx(predicted).epsilon(1e-7));
  CHECK(predicted >= 0.0);
}

TEST_CASE("integration keeps unit norms, hits t_end and never lowers the energy") {
  const auto f = random_fixture(37, 15, 4, 1.0);
  const auto rec = sal::integrate(f.cfg, f.s, {.t_end = 3.3, .dt = 0.01, .record_every = 7});
  CHECK(rec.times.back() == 3.3);
  CHECK_FALSE(rec.aborted);
  for (const auto& x : rec.states) CHECK((x.rowwise().norm().array() - 1.0).abs().maxCoeff() < 1e-13);
  for (std::size_t k = 1; k < rec.energies.size(); ++k) CHECK(rec.energies[k] >= rec.energies[k - 1] - 1e-12);
  CHECK(rec.worst_step_energy_drop <= 1e-12);
}

TEST_CASE("step count rounds up and shrinks the step") {
  const auto f = random_fixture(38, 3, 2, 1.0);
  const auto rec = sal::integrate(f.cfg, f.s, {.t_end = 0.25, .dt = 0.1, .record_every = 1});
  REQUIRE(rec.size() == 4);
  CHECK(rec.times[1] == doctest::Approx(0.25 / 3.0));
  CHECK(rec.times.back() == 0.25);
}

TEST_CASE("t_end zero records only the initial state") {
  const auto f = random_fixture(39, 4, 3, 1.0);
  const auto rec = sal::integrate(f.cfg, f.s, {.t_end = 0.0, .dt = 0.1});
  REQUIRE(rec.size() == 1);
  CHECK(rec.final_states() == f.cfg.states);
}

TEST_CASE("beta zero records NaN energies") {
  const auto f = random_fixture(40, 4, 3, 0.0);
  const auto rec = sal::integrate(f.cfg, f.s, {.t_end = 0.1, .dt = 0.05});
  for (double e : rec.energies) CHECK(std::isnan(e));
}

TEST_CASE("RK4 converges at fourth order") {
  const auto f = random_fixture(41, 5, 3, 1.0);
  const auto ref = sal::integrate(f.cfg, f.s, {.t_end = 1.0, .dt = 1e-3});
  const auto coarse = sal::integrate(f.cfg, f.s, {.t_end = 1.0, .dt = 0.1});
  const auto fine = sal::integrate(f.cfg, f.s, {.t_end = 1.0, .dt = 0.05});
  const double e1 = (coarse.final_states() - ref.final_states()).cwiseAbs().maxCoeff();
  const double e2 = (fine.final_states() - ref.final_states()).cwiseAbs().maxCoeff();
  CHECK(e1 / e2 > 10.0);
}

TEST_CASE("non-finite scores abort the run") {
  Fixture f = random_fixture(42, 4, 3, std::numeric_limits<double>::max());
  f.v *= 10.0;
  f.s = sal::decompose_symmetric(f.v);
  CHECK_THROWS_AS((void)sal::attention_weights(f.cfg, f.s), sal::NumericError);
  const auto rec = sal::integrate(f.cfg, f.s, {.t_end = 1.0, .dt = 0.1, .record_energy = false});
  CHECK(rec.aborted);
  CHECK_FALSE(rec.abort_reason.empty());
  CHECK(rec.last_valid_time == rec.times.back());
}

TEST_CASE("configuration validation") {
  Configuration cfg{Eigen::MatrixXd::Ones(2, 2), 1.0};
  CHECK_THROWS_AS(cfg.validate(), sal::ValidationError);
  cfg.states.rowwise().normalize();
  CHECK_NOTHROW(cfg.validate());
  cfg.beta = -1.0;
  CHECK_THROWS_AS(cfg.validate(), sal::ValidationError);
  cfg.beta = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(cfg.validate(), sal::ValidationError);
}

}  // TEST_SUITE
