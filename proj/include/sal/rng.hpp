#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace sal {

/// Seeded stream with platform-independent transforms: the engine is
/// std::mt19937_64 (fully specified by the standard); uniforms use the top
/// 53 bits and normals use Box-Muller, so draws match across compilers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  [[nodiscard]] std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform();
  double normal();
  /// Uniform point on S^{d-1}.
  Eigen::VectorXd unit_vector(Eigen::Index d);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Seed of the substream for trial k of a run seeded with `seed` (seed + k).
[[nodiscard]] std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial);

}  // namespace sal
