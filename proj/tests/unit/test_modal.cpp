#include <doctest.h>

#include "../oracles.hpp"
#include "sal/dynamics.hpp"
#include "sal/modal.hpp"
#include "sal/reduced.hpp"
#include "sal/spectral.hpp"

#include <cmath>

namespace {

sal::ModalCoordinates modal_of(const Eigen::MatrixXd& coeffs, const Eigen::VectorXd& lambdas) {
  const std::vector<double> l(lambdas.data(), lambdas.data() + lambdas.size());
  return {coeffs, sal::spectrum_from_diagonal(l)};
}

}  // namespace

TEST_SUITE("modal") {

TEST_CASE("modal field is the ambient field in the eigenbasis") {
  std::mt19937_64 gen(51);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd v = oracle::random_symmetric(4, gen);
    const auto s = sal::decompose_symmetric(v);
    const sal::Configuration cfg{oracle::random_unit_rows(6, 4, gen), 1.4};
    const auto c = sal::to_modal(cfg, s);
    const Eigen::MatrixXd want = oracle::vector_field(cfg.states, v, 1.4) * s.basis;
    CHECK((sal::modal_field(c, 1.4) - want).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((sal::to_ambient(c, 1.4).states - cfg.states).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("replicator rates equal d/dt c^2 and conserve mass per token") {
  std::mt19937_64 gen(52);
  const Eigen::Vector3d lambdas(1.0, 0.2, -0.7);
  const auto c = modal_of(oracle::random_unit_rows(5, 3, gen), lambdas);
  const auto view = sal::replicator_view(c, 0.9);
  const Eigen::MatrixXd cdot = sal::modal_field(c, 0.9);
  const Eigen::MatrixXd direct = 2.0 * c.coeffs.cwiseProduct(cdot);
  CHECK((view.mass_rates - direct).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(view.mass_rates.rowwise().sum().cwiseAbs().maxCoeff() < 1e-14);
  CHECK((view.masses.masses.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-14);
}

TEST_CASE("off-support coefficients have undefined fitness and zero rate") {
  Eigen::MatrixXd coeffs(2, 3);
  coeffs << 0.6, 0.8, 0.0, 1.0, 0.0, 0.0;
  const auto c = modal_of(coeffs, Eigen::Vector3d(1.0, 0.5, -1.0));
  const auto view = sal::replicator_view(c, 1.0);
  CHECK_FALSE(view.masses.fitness_defined(0, 2));
  CHECK(view.masses.fitness_defined(0, 0));
  CHECK(view.mass_rates(0, 2) == 0.0);
  CHECK(view.mass_rates(1, 1) == 0.0);
}

TEST_CASE("consensus configuration follows the reduced consensus field") {
  const Eigen::Vector3d lambdas(0.9, 0.1, -0.4);
  const Eigen::Vector3d c0 = Eigen::Vector3d(0.3, -0.5, 0.6).normalized();
  Eigen::MatrixXd coeffs(4, 3);
  for (int i = 0; i < 4; ++i) coeffs.row(i) = c0.transpose();
  const auto c = modal_of(coeffs, lambdas);
  const auto view = sal::replicator_view(c, 2.0);
  const Eigen::VectorXd p = c0.cwiseAbs2();
  const Eigen::VectorXd want = sal::consensus_field(p, lambdas);
  for (int i = 0; i < 4; ++i) CHECK((view.mass_rates.row(i).transpose() - want).norm() < 1e-14);
  CHECK((sal::averaged_mass_rates(c, 2.0) - want).norm() < 1e-14);
}

TEST_CASE("averaged masses lie on the simplex") {
  std::mt19937_64 gen(53);
  const auto c = modal_of(oracle::random_unit_rows(30, 4, gen), Eigen::Vector4d(2, 1, 0, -1));
  const Eigen::VectorXd m = sal::averaged_masses(c);
  CHECK(m.sum() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m.minCoeff() >= 0.0);
}

TEST_CASE("averaged masses do not determine their own rate") {
  // Same m, different coefficient signs: the rates differ, so no closed
  // equation in m alone exists.
  const Eigen::Vector2d lambdas(1.0, -1.0);
  Eigen::MatrixXd aligned(2, 2), flipped(2, 2);
  aligned << 0.6, 0.8, 0.6, 0.8;
  flipped << 0.6, 0.8, 0.6, -0.8;
  const auto a = modal_of(aligned, lambdas);
  const auto b = modal_of(flipped, lambdas);
  CHECK((sal::averaged_masses(a) - sal::averaged_masses(b)).norm() < 1e-15);
  const Eigen::VectorXd ra = sal::averaged_mass_rates(a, 1.0);
  const Eigen::VectorXd rb = sal::averaged_mass_rates(b, 1.0);
  CHECK(ra(0) == doctest::Approx(2.0 * 0.36 * (1.0 - (0.36 - 0.64))).epsilon(1e-12));
  CHECK(std::abs(ra(0) - rb(0)) > 0.1);
}

}  // TEST_SUITE
