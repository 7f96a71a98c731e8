#include "sal/experiments.hpp"

#include "sal/config.hpp"
#include "sal/csv.hpp"
#include "sal/errors.hpp"
#include "sal/modal.hpp"
#include "sal/rng.hpp"
#include "sal/selection.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

namespace sal {

Sampler parse_sampler(std::string_view id) {
  if (id == "uniform-sphere") return Sampler::UniformSphere;
  if (id == "one-sided-cone") return Sampler::OneSidedCone;
  if (id == "mixed-sign") return Sampler::MixedSign;
  if (id == "consensus") return Sampler::Consensus;
  if (id == "bipolar") return Sampler::Bipolar;
  throw ValidationError("unknown sampler id '" + std::string(id) +
                        "' (expected uniform-sphere, one-sided-cone, mixed-sign, consensus, bipolar)");
}

std::string_view to_string(Sampler s) {
  switch (s) {
    case Sampler::UniformSphere:
      return "uniform-sphere";
    case Sampler::OneSidedCone:
      return "one-sided-cone";
    case Sampler::MixedSign:
      return "mixed-sign";
    case Sampler::Consensus:
      return "consensus";
    case Sampler::Bipolar:
      return "bipolar";
  }
  return "unknown";
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Consensus:
      return "consensus";
    case Outcome::Polarized:
      return "polarized";
    case Outcome::Other:
      return "other";
  }
  return "unknown";
}

Configuration sample_initial(const SamplerOptions& opts, Eigen::Index n, const Spectrum& s,
                             std::uint64_t seed, double beta) {
  const Eigen::Index d = s.dim();
  if (n < 1) throw ValidationError("sampler: n must be >= 1");
  if (d < 1) throw ValidationError("sampler: d must be >= 1");
  Rng rng(seed);
  Eigen::MatrixXd c(n, d);

  switch (opts.kind) {
    case Sampler::UniformSphere:
      for (Eigen::Index i = 0; i < n; ++i) c.row(i) = rng.unit_vector(d).transpose();
      break;
    case Sampler::OneSidedCone: {
      if (!(opts.delta > 0.0 && opts.delta < 1.0)) {
        throw ValidationError("one-sided-cone sampler: delta must lie in (0, 1)");
      }
      if (d < 2 && opts.delta > 1.0) throw ValidationError("one-sided-cone sampler: empty cone");
      for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::VectorXd v = rng.unit_vector(d);
        v(0) = std::abs(v(0));
        while (v(0) < opts.delta) {
          v = rng.unit_vector(d);
          v(0) = std::abs(v(0));
        }
        v(0) *= opts.orientation;
        c.row(i) = v.transpose();
      }
      break;
    }
    case Sampler::MixedSign: {
      if (n < 2) throw ValidationError("mixed-sign sampler: needs n >= 2");
      constexpr int kMaxAttempts = 10000;
      int attempt = 0;
      do {
        if (++attempt > kMaxAttempts) throw NumericError("mixed-sign sampler: too many redraws");
        for (Eigen::Index i = 0; i < n; ++i) c.row(i) = rng.unit_vector(d).transpose();
      } while (!(c.col(0).minCoeff() < 0.0 && c.col(0).maxCoeff() > 0.0));
      break;
    }
    case Sampler::Consensus:
      c.rowwise() = rng.unit_vector(d).transpose();
      break;
    case Sampler::Bipolar: {
      if (n % 2 != 0) throw ValidationError("bipolar sampler: n must be even");
      const Eigen::RowVectorXd u = rng.unit_vector(d).transpose();
      c.topRows(n / 2).rowwise() = u;
      c.bottomRows(n / 2).rowwise() = -u;
      break;
    }
  }
  Configuration cfg{c * s.basis.transpose(), beta};
  cfg.states.rowwise().normalize();
  return cfg;
}

std::uint64_t hash_states(const Eigen::MatrixXd& states) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (Eigen::Index i = 0; i < states.rows(); ++i) {
    for (Eigen::Index k = 0; k < states.cols(); ++k) {
      const double v = states(i, k);
      unsigned char bytes[sizeof(double)];
      std::memcpy(bytes, &v, sizeof(double));
      for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
      }
    }
  }
  return h;
}

void ExperimentSpec::validate() const {
  if (n < 1) throw ValidationError("experiment: n must be >= 1");
  if (trials < 1) throw ValidationError("experiment: trials must be >= 1");
  if (betas.empty()) throw ValidationError("experiment: at least one beta is required");
  for (double b : betas) {
    if (!std::isfinite(b) || b < 0.0) throw ValidationError("experiment: beta must be finite and >= 0");
  }
  if (V.rows() == 0 || V.rows() != V.cols()) throw ValidationError("experiment: V must be square");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ValidationError("experiment: t_end must be >= 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("experiment: dt must be > 0");
  if (record_every < 1) throw ValidationError("experiment: record_every must be >= 1");
  if (threads < 1) throw ValidationError("experiment: threads must be >= 1");
}

std::vector<std::string> observable_columns(Eigen::Index d) {
  std::vector<std::string> cols = {"rho_min", "rho_max", "rho_abs", "top_distance", "energy"};
  for (Eigen::Index k = 1; k <= d; ++k) cols.push_back("m_" + std::to_string(k));
  return cols;
}

bool EnsembleSummary::any_aborted() const {
  for (const auto& p : panels) {
    if (p.completed != static_cast<int>(p.trials.size())) return true;
  }
  return false;
}

Eigen::Index EnsembleSummary::column(std::string_view name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw ValidationError("no observable column '" + std::string(name) + "'");
  return static_cast<Eigen::Index>(it - columns.begin());
}

namespace {

constexpr Eigen::Index kRhoMin = 0;
constexpr Eigen::Index kEnergy = 4;

Eigen::RowVectorXd observe(const Eigen::MatrixXd& x, const Spectrum& s, double energy_value) {
  const Eigen::Index d = x.cols();
  Eigen::RowVectorXd row(5 + d);
  if (x.rows() >= 2) {
    const PairwiseObservables p = pairwise_observables(x);
    row(0) = p.rho_min;
    row(1) = p.rho_max;
    row(2) = p.rho_abs;
  } else {
    row.head(3).setConstant(std::nan(""));
  }
  const Eigen::RowVectorXd e1 = s.basis.col(0).transpose();
  row(3) = (x.rowwise() - e1).rowwise().norm().maxCoeff();
  row(kEnergy) = energy_value;
  row.tail(d) = (x * s.basis).cwiseAbs2().colwise().mean();
  return row;
}

void write_trajectory(const std::filesystem::path& path, const TrajectoryRecord& rec) {
  CsvWriter w(path);
  std::vector<std::string> header = {"t", "i"};
  const Eigen::Index d = rec.states.front().cols();
  for (Eigen::Index k = 1; k <= d; ++k) header.push_back("x_" + std::to_string(k));
  w.header(header);
  for (std::size_t r = 0; r < rec.size(); ++r) {
    for (Eigen::Index i = 0; i < rec.states[r].rows(); ++i) {
      w.cell(rec.times[r]).cell(static_cast<std::int64_t>(i)).cells(rec.states[r].row(i).transpose());
      w.end_row();
    }
  }
}

}  // namespace

EnsembleSummary run_experiment(const ExperimentSpec& spec,
                               const std::optional<std::filesystem::path>& output_dir) {
  spec.validate();
  const Spectrum s = decompose_symmetric(spec.V);
  const Eigen::Index d = s.dim();

  EnsembleSummary summary;
  summary.columns = observable_columns(d);

  // Initial data depends only on (seed, trial), never on beta.
  std::vector<Eigen::MatrixXd> initial(static_cast<std::size_t>(spec.trials));
  for (int k = 0; k < spec.trials; ++k) {
    initial[static_cast<std::size_t>(k)] =
        sample_initial(spec.sampler, spec.n, s, trial_seed(spec.seed, static_cast<std::uint64_t>(k)))
            .states;
  }
  if (output_dir && spec.write_trajectories) {
    std::filesystem::create_directories(*output_dir / "trajectories");
  }

  for (std::size_t b = 0; b < spec.betas.size(); ++b) {
    const double beta = spec.betas[b];
    BetaPanel panel;
    panel.beta = beta;
    panel.trials.resize(static_cast<std::size_t>(spec.trials));
    std::vector<std::vector<double>> times(static_cast<std::size_t>(spec.trials));

    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
      for (int k = next++; k < spec.trials; k = next++) {
        try {
          const auto idx = static_cast<std::size_t>(k);
          TrialSeries& trial = panel.trials[idx];
          trial.initial_hash = hash_states(initial[idx]);
          IntegrationOptions opts{.t_end = spec.t_end,
                                  .dt = spec.dt,
                                  .record_every = spec.record_every,
                                  .record_energy = beta > 0.0};
          const TrajectoryRecord rec = integrate(Configuration{initial[idx], beta}, s, opts);
          trial.aborted = rec.aborted;
          trial.abort_reason = rec.abort_reason;
          trial.values.resize(static_cast<Eigen::Index>(rec.size()),
                              static_cast<Eigen::Index>(summary.columns.size()));
          for (std::size_t r = 0; r < rec.size(); ++r) {
            const double e = rec.energies.empty() ? std::nan("") : rec.energies[r];
            trial.values.row(static_cast<Eigen::Index>(r)) = observe(rec.states[r], s, e);
          }
          times[idx] = rec.times;
          if (!trial.aborted && spec.n >= 2) {
            const double rho_min = trial.values(trial.values.rows() - 1, kRhoMin);
            trial.outcome = rho_min > spec.consensus_cutoff      ? Outcome::Consensus
                            : rho_min < spec.polarization_cutoff ? Outcome::Polarized
                                                                 : Outcome::Other;
          }
          if (output_dir && spec.write_trajectories) {
            write_trajectory(*output_dir / "trajectories" /
                                 ("beta" + std::to_string(b) + "_trial" + std::to_string(k) + ".csv"),
                             rec);
          }
        } catch (...) {
          const std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    };
    const int workers = std::min(spec.threads, spec.trials);
    if (workers <= 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    // Reference time grid from the first completed trial.
    const auto cols = static_cast<Eigen::Index>(summary.columns.size());
    for (std::size_t k = 0; k < panel.trials.size(); ++k) {
      if (!panel.trials[k].aborted) {
        panel.times = times[k];
        break;
      }
    }
    const auto rows = static_cast<Eigen::Index>(panel.times.size());
    panel.mean = Eigen::MatrixXd::Zero(rows, cols);
    panel.stddev = Eigen::MatrixXd::Zero(rows, cols);
    int consensus = 0;
    int polarized = 0;
    for (const auto& trial : panel.trials) {
      if (trial.aborted) continue;
      ++panel.completed;
      panel.mean += trial.values;
      consensus += trial.outcome == Outcome::Consensus;
      polarized += trial.outcome == Outcome::Polarized;
    }
    if (panel.completed > 0) {
      panel.mean /= panel.completed;
      for (const auto& trial : panel.trials) {
        if (!trial.aborted) panel.stddev += (trial.values - panel.mean).cwiseAbs2();
      }
      panel.stddev = (panel.stddev / panel.completed).cwiseSqrt();
    }
    panel.consensus_fraction = static_cast<double>(consensus) / spec.trials;
    panel.polarization_fraction = static_cast<double>(polarized) / spec.trials;
    summary.panels.push_back(std::move(panel));
  }
  return summary;
}

void write_experiment_outputs(const EnsembleSummary& summary, const ExperimentSpec& spec,
                              const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    CsvWriter w(dir / "observables.csv");
    std::vector<std::string> header = {"beta", "trial", "t"};
    header.insert(header.end(), summary.columns.begin(), summary.columns.end());
    w.header(header);
    for (const auto& panel : summary.panels) {
      for (std::size_t k = 0; k < panel.trials.size(); ++k) {
        const auto& v = panel.trials[k].values;
        const auto rows = std::min(v.rows(), static_cast<Eigen::Index>(panel.times.size()));
        for (Eigen::Index r = 0; r < rows; ++r) {
          w.cell(panel.beta).cell(static_cast<std::int64_t>(k)).cell(panel.times[static_cast<std::size_t>(r)]);
          w.cells(v.row(r).transpose());
          w.end_row();
        }
      }
    }
  }
  {
    CsvWriter w(dir / "summary.csv");
    std::vector<std::string> header = {"beta", "t"};
    for (const auto& c : summary.columns) {
      header.push_back(c + "_mean");
      header.push_back(c + "_std");
    }
    w.header(header);
    for (const auto& panel : summary.panels) {
      for (Eigen::Index r = 0; r < panel.mean.rows(); ++r) {
        w.cell(panel.beta).cell(panel.times[static_cast<std::size_t>(r)]);
        for (Eigen::Index c = 0; c < panel.mean.cols(); ++c) {
          w.cell(panel.mean(r, c)).cell(panel.stddev(r, c));
        }
        w.end_row();
      }
    }
  }
  {
    CsvWriter w(dir / "outcomes.csv");
    w.header({"beta", "trial", "initial_hash", "rho_min_T", "rho_abs_T", "top_distance_T",
              "m_d_T", "outcome", "aborted"});
    for (const auto& panel : summary.panels) {
      for (std::size_t k = 0; k < panel.trials.size(); ++k) {
        const auto& t = panel.trials[k];
        char hash[17];
        std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(t.initial_hash));
        const Eigen::RowVectorXd last = t.values.bottomRows(1);
        w.cell(panel.beta).cell(static_cast<std::int64_t>(k)).cell(std::string_view(hash));
        w.cell(last(0)).cell(last(2)).cell(last(3)).cell(last(last.size() - 1));
        w.cell(to_string(t.outcome)).cell(std::string_view(t.aborted ? "1" : "0"));
        w.end_row();
      }
    }
  }
  Json panels = Json::array();
  for (const auto& panel : summary.panels) {
    panels.push_back({{"beta", panel.beta},
                      {"completed", panel.completed},
                      {"consensus_fraction", panel.consensus_fraction},
                      {"polarization_fraction", panel.polarization_fraction}});
  }
  const Json spec_json = to_json(spec);
  const Json manifest = {{"name", spec.name},
                         {"spec_hash", spec_hash(spec_json)},
                         {"seed", spec.seed},
                         {"code_version", std::string(kCodeVersion)},
                         {"spec", spec_json},
                         {"panels", panels},
                         {"files", {"observables.csv", "summary.csv", "outcomes.csv"}}};
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw ValidationError("cannot write manifest.json in " + dir.string());
  out << manifest.dump(2) << '\n';
}

}  // namespace sal
