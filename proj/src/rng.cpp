#include "sal/rng.hpp"

#include <cmath>
#include <numbers>

namespace sal {

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 == 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

Eigen::VectorXd Rng::unit_vector(Eigen::Index d) {
  Eigen::VectorXd v(d);
  double norm = 0.0;
  while (norm < 1e-12) {
    for (Eigen::Index k = 0; k < d; ++k) v(k) = normal();
    norm = v.norm();
  }
  return v / norm;
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) { return seed + trial; }

}  // namespace sal
