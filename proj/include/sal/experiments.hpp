#pragma once

#include "sal/dynamics.hpp"
#include "sal/spectral.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sal {

inline constexpr std::string_view kCodeVersion = "0.3.0";

enum class Sampler { UniformSphere, OneSidedCone, MixedSign, Consensus, Bipolar };

[[nodiscard]] Sampler parse_sampler(std::string_view id);
[[nodiscard]] std::string_view to_string(Sampler s);

struct SamplerOptions {
  Sampler kind = Sampler::UniformSphere;
  /// cone half-width parameter: c_i1 >= delta
  double delta = 0.1;
  /// -1 samples the mirrored cone c_i1 <= -delta
  int orientation = 1;
};

/// Initial data drawn in eigen-coordinates of `s` and mapped back, so the
/// cone and sign constraints refer to the eigenbasis.
///   uniform-sphere: normalized standard normals per token
///   one-sided-cone: uniform, then c_i1 -> |c_i1|, rejecting c_i1 < delta
///   mixed-sign: uniform, redrawn until mode 1 carries both signs
///   consensus: one uniform point shared by all tokens
///   bipolar: x_i = +u for the first n/2 tokens and -u for the rest
[[nodiscard]] Configuration sample_initial(const SamplerOptions& opts, Eigen::Index n,
                                           const Spectrum& s, std::uint64_t seed,
                                           double beta = 1.0);

/// FNV-1a over the IEEE bit patterns of the states, row-major.
[[nodiscard]] std::uint64_t hash_states(const Eigen::MatrixXd& states);

struct ExperimentSpec {
  std::string name = "experiment";
  Eigen::Index n = 2;
  std::vector<double> betas{1.0};
  Eigen::MatrixXd V;
  SamplerOptions sampler;
  int trials = 1;
  double t_end = 1.0;
  double dt = 1e-2;
  std::uint64_t seed = 0;
  int record_every = 10;
  double consensus_cutoff = 0.99;
  double polarization_cutoff = -0.9;
  bool write_trajectories = false;
  int threads = 1;

  void validate() const;
};

/// Column order of the per-trial observable matrices.
[[nodiscard]] std::vector<std::string> observable_columns(Eigen::Index d);

enum class Outcome { Consensus, Polarized, Other };
[[nodiscard]] std::string_view to_string(Outcome o);

struct TrialSeries {
  std::uint64_t initial_hash = 0;
  /// rows: recorded times; columns: observable_columns(d)
  Eigen::MatrixXd values;
  Outcome outcome = Outcome::Other;
  bool aborted = false;
  std::string abort_reason;
};

struct BetaPanel {
  double beta = 1.0;
  std::vector<double> times;
  std::vector<TrialSeries> trials;
  /// over completed trials, population standard deviation
  Eigen::MatrixXd mean;
  Eigen::MatrixXd stddev;
  int completed = 0;
  double consensus_fraction = 0.0;
  double polarization_fraction = 0.0;
};

struct EnsembleSummary {
  std::vector<std::string> columns;
  std::vector<BetaPanel> panels;

  [[nodiscard]] bool any_aborted() const;
  [[nodiscard]] Eigen::Index column(std::string_view name) const;
};

/// Runs every (beta, trial) pair. Trial k draws its initial data from
/// seed + k, so all beta panels share the same initial configurations.
/// With `output_dir`, per-trial trajectories are written when requested.
[[nodiscard]] EnsembleSummary run_experiment(
    const ExperimentSpec& spec, const std::optional<std::filesystem::path>& output_dir = {});

/// observables.csv, summary.csv, outcomes.csv and manifest.json.
void write_experiment_outputs(const EnsembleSummary& summary, const ExperimentSpec& spec,
                              const std::filesystem::path& dir);

}  // namespace sal
