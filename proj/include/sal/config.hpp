#pragma once

#include "sal/dynamics.hpp"
#include "sal/experiments.hpp"

#include <json.hpp>

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sal {

using Json = nlohmann::json;

[[nodiscard]] Json load_json(const std::filesystem::path& path);

/// Rectangular array of numbers.
[[nodiscard]] Eigen::MatrixXd parse_matrix(const Json& j, const std::string& what);
[[nodiscard]] Json matrix_to_json(const Eigen::MatrixXd& m);

/// Reads "V" (dense rows) or "diag" (eigenvalues of a diagonal V) from a
/// config object; exactly one must be present.
[[nodiscard]] Eigen::MatrixXd parse_interaction(const Json& config);

/// Initial data block: {"sampler": id, "delta": .., "orientation": ..},
/// {"states": [[..]]} or {"file": "states.csv"} (relative to `base_dir`).
struct InitialData {
  SamplerOptions sampler;
  std::optional<Eigen::MatrixXd> states;
};
[[nodiscard]] InitialData parse_initial(const Json& j, const std::filesystem::path& base_dir);

/// Single-run settings for the simulate subcommand.
struct SimulationConfig {
  Eigen::MatrixXd V;
  double beta = 1.0;
  Eigen::Index n = 2;
  InitialData initial;
  IntegrationOptions integration{.t_end = 1.0};
  std::uint64_t seed = 0;
};

[[nodiscard]] SimulationConfig simulation_config_from_json(const Json& j,
                                                           const std::filesystem::path& base_dir);
[[nodiscard]] ExperimentSpec experiment_spec_from_json(const Json& j);
[[nodiscard]] Json to_json(const ExperimentSpec& spec);

struct ThresholdSpec {
  std::string name = "threshold";
  double lambda_p = 1.0;
  std::vector<double> ratios{1.0};
  std::vector<double> betas;
};
[[nodiscard]] ThresholdSpec threshold_spec_from_json(const Json& j);
[[nodiscard]] Json to_json(const ThresholdSpec& spec);

/// `count` evenly spaced values on [lo, hi].
[[nodiscard]] std::vector<double> linspace(double lo, double hi, int count);

/// 16 hex digits of FNV-1a 64 over the compact dump (keys sorted).
[[nodiscard]] std::string spec_hash(const Json& j);

}  // namespace sal
