#include "sal/cli.hpp"

#include "sal/config.hpp"
#include "sal/csv.hpp"
#include "sal/errors.hpp"
#include "sal/experiments.hpp"
#include "sal/modal.hpp"
#include "sal/reduced.hpp"
#include "sal/selection.hpp"
#include "sal/stability.hpp"
#include "sal/verify.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

namespace sal {

namespace fs = std::filesystem;

namespace {

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("SAL_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(raw, &used);
    if (used != std::string(raw).size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(std::string("SAL_SEED must be a non-negative integer, got '") + raw + "'");
  }
}

/// flag > SAL_SEED > file > default
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t from_file) {
  if (flag) return *flag;
  if (auto env = env_seed()) return *env;
  return from_file;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void write_json(const fs::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

Json complex_to_json(const std::complex<double>& z) { return Json::array({z.real(), z.imag()}); }

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string config;
  std::vector<double> diag;
  std::optional<double> beta, dt, t_end, delta;
  std::optional<std::uint64_t> seed;
  std::optional<Eigen::Index> n;
  std::optional<int> record_every;
  std::string sampler;
  std::optional<double> cone_delta;
  std::string out_dir = "sal-out";
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  SimulationConfig c;
  if (!a.config.empty()) {
    const fs::path path(a.config);
    c = simulation_config_from_json(load_json(path), path.parent_path());
  } else if (a.diag.empty()) {
    throw ValidationError("simulate: need --config or --diag");
  }
  if (!a.diag.empty()) c.V = to_vector(a.diag).asDiagonal();
  if (a.beta) c.beta = *a.beta;
  if (a.dt) c.integration.dt = *a.dt;
  if (a.t_end) c.integration.t_end = *a.t_end;
  if (a.record_every) c.integration.record_every = *a.record_every;
  if (a.n) c.n = *a.n;
  if (!a.sampler.empty()) {
    c.initial.states.reset();
    c.initial.sampler.kind = parse_sampler(a.sampler);
  }
  if (a.delta) c.initial.sampler.delta = *a.delta;
  c.seed = resolve_seed(a.seed, c.seed);
  if (!(c.integration.dt > 0.0)) throw ValidationError("simulate: dt must be > 0");
  if (!(c.integration.t_end >= 0.0)) throw ValidationError("simulate: t_end must be >= 0");
  if (c.integration.record_every < 1) throw ValidationError("simulate: record_every must be >= 1");

  const Spectrum s = decompose_symmetric(c.V);
  Configuration cfg = c.initial.states ? Configuration{*c.initial.states, c.beta}
                                       : sample_initial(c.initial.sampler, c.n, s, c.seed, c.beta);
  if (cfg.d() != s.dim()) throw ValidationError("simulate: initial states do not match the size of V");
  cfg.validate();
  c.integration.record_energy = c.beta > 0.0;

  const TrajectoryRecord rec = integrate(cfg, s, c.integration);
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  const Eigen::Index d = s.dim();
  {
    CsvWriter w(dir / "trajectory.csv");
    std::vector<std::string> header = {"t", "i"};
    for (Eigen::Index k = 1; k <= d; ++k) header.push_back("x_" + std::to_string(k));
    w.header(header);
    for (std::size_t r = 0; r < rec.size(); ++r) {
      for (Eigen::Index i = 0; i < rec.states[r].rows(); ++i) {
        w.cell(rec.times[r]).cell(static_cast<std::int64_t>(i)).cells(rec.states[r].row(i).transpose());
        w.end_row();
      }
    }
  }
  {
    CsvWriter w(dir / "energy.csv");
    w.header({"t", "energy"});
    for (std::size_t r = 0; r < rec.size(); ++r) {
      w.cell(rec.times[r]).cell(rec.energies.empty() ? std::nan("") : rec.energies[r]);
      w.end_row();
    }
  }
  {
    CsvWriter obs(dir / "observables.csv");
    std::vector<std::string> header = {"t", "rho_min", "rho_max", "rho_abs"};
    for (Eigen::Index k = 1; k <= d; ++k) header.push_back("m_" + std::to_string(k));
    obs.header(header);
    CsvWriter masses(dir / "masses.csv");
    masses.header({"t", "k", "m_k"});
    for (std::size_t r = 0; r < rec.size(); ++r) {
      const ModalCoordinates mc = to_modal(rec.snapshot(r), s);
      const Eigen::VectorXd m = averaged_masses(mc);
      obs.cell(rec.times[r]);
      if (cfg.n() >= 2) {
        const PairwiseObservables p = pairwise_observables(rec.states[r]);
        obs.cell(p.rho_min).cell(p.rho_max).cell(p.rho_abs);
      } else {
        obs.cell(std::nan("")).cell(std::nan("")).cell(std::nan(""));
      }
      obs.cells(m);
      obs.end_row();
      for (Eigen::Index k = 0; k < d; ++k) {
        masses.cell(rec.times[r]).cell(static_cast<std::int64_t>(k + 1)).cell(m(k));
        masses.end_row();
      }
    }
  }
  if (a.cone_delta) {
    const ConeDiagnostics diag = cone_check(rec, s, *a.cone_delta);
    CsvWriter w(dir / "cone.csv");
    std::vector<std::string> header = {"t", "min_c1"};
    for (Eigen::Index k = 2; k <= d; ++k) {
      header.push_back("R_" + std::to_string(k));
      header.push_back("bound_" + std::to_string(k));
    }
    w.header(header);
    for (std::size_t r = 0; r < diag.times.size(); ++r) {
      const auto row = static_cast<Eigen::Index>(r);
      w.cell(diag.times[r]).cell(diag.min_c1[r]);
      for (Eigen::Index k = 0; k + 1 < d; ++k) w.cell(diag.ratios(row, k)).cell(diag.bounds(row, k));
      w.end_row();
    }
    out << "cone: min_c1 monotone=" << diag.min_c1_monotone() << " bound holds=" << diag.bound_holds()
        << " final distance=" << diag.final_distance << '\n';
  }
  write_json(dir / "manifest.json",
             {{"command", "simulate"},
              {"seed", c.seed},
              {"beta", c.beta},
              {"n", cfg.n()},
              {"d", d},
              {"t_end", c.integration.t_end},
              {"dt", c.integration.dt},
              {"code_version", std::string(kCodeVersion)},
              {"aborted", rec.aborted}});
  out << "simulate: " << rec.size() << " records written to " << dir.string() << '\n';
  if (rec.aborted) {
    err << "error: integration stopped at t = " << rec.last_valid_time << ": " << rec.abort_reason << '\n';
    return kExitNumeric;
  }
  return kExitOk;
}

// ----------------------------------------------------------------- reduced

struct ReducedArgs {
  std::string kind;
  std::vector<double> lambdas;
  std::vector<double> p0;
  double beta = 1.0;
  double t_end = 10.0;
  double dt = 1e-2;
  int record_every = 10;
  std::string out_dir = "sal-out";
};

int cmd_reduced(const ReducedArgs& a, std::ostream& out) {
  const Eigen::VectorXd lambdas = to_vector(a.lambdas);
  const Eigen::VectorXd p0 = to_vector(a.p0);
  const IntegrationOptions opts{.t_end = a.t_end, .dt = a.dt, .record_every = a.record_every};
  const bool consensus = a.kind == "consensus";
  if (!consensus && a.kind != "bipolar") {
    throw ValidationError("reduced: kind must be 'consensus' or 'bipolar'");
  }
  const ReducedTrajectory traj = consensus ? integrate_consensus(p0, lambdas, opts)
                                           : integrate_bipolar(p0, lambdas, a.beta, opts);
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  CsvWriter w(dir / "reduced.csv");
  std::vector<std::string> header = {"t", "M"};
  for (Eigen::Index k = 1; k <= p0.size(); ++k) header.push_back("p_" + std::to_string(k));
  if (consensus) {
    for (Eigen::Index k = 1; k <= p0.size(); ++k) header.push_back("p_exact_" + std::to_string(k));
  }
  w.header(header);
  for (std::size_t r = 0; r < traj.times.size(); ++r) {
    w.cell(traj.times[r]).cell(traj.M[r]).cells(traj.p[r]);
    if (consensus) w.cells(consensus_closed_form(p0, lambdas, traj.times[r]));
    w.end_row();
  }

  Json report = {{"kind", a.kind}, {"M0", lambdas.dot(p0)}};
  Eigen::VectorXd limit;
  if (consensus) {
    limit = consensus_limit(p0, lambdas);
  } else {
    const BipolarLimit lim = bipolar_limit(p0, lambdas, a.beta);
    limit = lim.p_limit;
    report["regime"] = lim.regime == BipolarRegime::Increasing   ? "increasing"
                       : lim.regime == BipolarRegime::Decreasing ? "decreasing"
                                                                 : "stationary";
    report["M_limit"] = lim.M_limit;
  }
  report["p_limit"] = std::vector<double>(limit.data(), limit.data() + limit.size());
  const Eigen::VectorXd& last = traj.p.back();
  report["p_final"] = std::vector<double>(last.data(), last.data() + last.size());
  out << report.dump() << '\n';
  return kExitOk;
}

// --------------------------------------------------------------- stability

struct StabilityArgs {
  std::vector<double> lambdas;
  double beta = 1.0;
  std::string pattern = "+";
  int p = 1;
  bool sign_split = false;
  bool oracle = false;
  bool curve = false;
  double lambda_p = 1.0;
  double r = 1.0;
  double beta_min = 0.0;
  double beta_max = 3.0;
  int beta_steps = 301;
  std::string out_file = "threshold.csv";
};

void write_threshold_csv(const fs::path& path, const std::vector<ThresholdPoint>& curve) {
  CsvWriter w(path);
  w.header({"beta", "sigma_bound", "is_endpoint"});
  for (const auto& pt : curve) {
    w.cell(pt.beta).cell(pt.sigma_bound).cell(static_cast<std::int64_t>(pt.is_endpoint));
    w.end_row();
  }
}

int cmd_stability(const StabilityArgs& a, std::ostream& out) {
  if (a.curve) {
    if (!(a.r > 0.0)) throw ValidationError("stability: --r must be positive");
    const auto grid = linspace(a.beta_min, a.beta_max, a.beta_steps);
    const auto curve = threshold_curve(a.lambda_p, a.r, grid);
    const fs::path path(a.out_file);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    write_threshold_csv(path, curve);
    out << "threshold curve (" << curve.size() << " points) written to " << path.string() << '\n';
    if (a.lambdas.empty()) return kExitOk;
  }
  if (a.lambdas.size() < 2) throw ValidationError("stability: --lambdas needs at least two values");
  const Eigen::VectorXd lambdas = to_vector(a.lambdas);
  const SignPattern pattern = SignPattern::parse(a.pattern);
  const Eigen::Index p = a.p - 1;
  if (p < 0 || p >= lambdas.size()) throw ValidationError("stability: --p must be in 1..d");
  if (a.sign_split && pattern.is_constant()) {
    throw ValidationError("stability: sign-split analysis needs a pattern with both signs");
  }

  Json report = {{"p", a.p}, {"n", pattern.n()}, {"beta", a.beta}};
  const auto spectrum = equilibrium_spectrum(p, lambdas, a.beta, pattern);
  if (pattern.is_constant()) {
    const HomogeneousStability h = homogeneous_stability(p, lambdas);
    report["kind"] = "homogeneous";
    report["verdict"] = std::string(to_string(h.verdict));
    report["rates"] = h.rates;
  } else {
    const StabilityReport r = sign_split_report(p, lambdas, a.beta, pattern);
    report["kind"] = "sign-split";
    report["n_plus"] = r.n_plus;
    report["n_minus"] = r.n_minus;
    report["a_plus"] = r.a_plus;
    report["b_plus"] = r.b_plus;
    report["a_minus"] = r.a_minus;
    report["b_minus"] = r.b_minus;
    report["gamma_plus"] = r.gamma_plus;
    report["gamma_minus"] = r.gamma_minus;
    Json blocks = Json::array();
    for (const auto& b : r.blocks) {
      blocks.push_back({{"k", b.mode + 1},
                        {"trace", b.trace},
                        {"det", b.det},
                        {"eigenvalues", {complex_to_json(b.eigenvalues[0]), complex_to_json(b.eigenvalues[1])}}});
    }
    report["blocks"] = blocks;
    report["stable"] = r.stable;
    report["verdict"] = std::string(to_string(r.stable ? Verdict::Stable : r.spectral_verdict));
    report["spectral_verdict"] = std::string(to_string(r.spectral_verdict));
    report["c_beta"] = r.c_beta;
    report["sigma"] = r.threshold_sigma;
    report["sigma_bound"] = lambdas(p) * r.threshold_sigma;
  }
  Json eigs = Json::array();
  for (const auto& e : spectrum) {
    eigs.push_back({{"k", e.mode + 1}, {"value", complex_to_json(e.value)}, {"multiplicity", e.multiplicity}});
  }
  report["spectrum"] = eigs;
  if (a.oracle) {
    const Spectrum s = spectrum_from_diagonal(a.lambdas);
    // spectrum_from_diagonal sorts; find the column that carries lambda_p.
    Eigen::Index col = 0;
    for (Eigen::Index k = 0; k < s.dim(); ++k) {
      if (std::abs(s.basis(p, k)) == 1.0) col = k;
    }
    const auto numeric = jacobian_oracle(pure_mode_configuration(s, col, pattern, a.beta), s, a.beta);
    report["oracle_distance"] = multiset_distance(numeric, expand(spectrum));
  }
  out << report.dump(2) << '\n';
  return kExitOk;
}

// --------------------------------------------------------------- threshold

struct ThresholdArgs {
  std::string config;
  std::optional<double> lambda_p;
  std::vector<double> ratios;
  std::optional<double> beta_min, beta_max;
  std::optional<int> beta_steps;
  std::string out_dir = "sal-out";
};

int run_threshold(const ThresholdSpec& spec, const fs::path& dir, std::ostream& out) {
  fs::create_directories(dir);
  Json files = Json::array();
  for (double r : spec.ratios) {
    if (!(r > 0.0)) throw ValidationError("threshold: ratios must be positive");
    const auto curve = threshold_curve(spec.lambda_p, r, spec.betas);
    const std::string name = "threshold_r" + format_double(r) + ".csv";
    write_threshold_csv(dir / name, curve);
    files.push_back(name);
  }
  const Json spec_json = to_json(spec);
  write_json(dir / "manifest.json", {{"name", spec.name},
                                     {"spec_hash", spec_hash(spec_json)},
                                     {"code_version", std::string(kCodeVersion)},
                                     {"spec", spec_json},
                                     {"files", files}});
  out << "threshold: " << files.size() << " curves written to " << dir.string() << '\n';
  return kExitOk;
}

int cmd_threshold(const ThresholdArgs& a, std::ostream& out) {
  ThresholdSpec spec;
  Json raw = Json::object();
  if (!a.config.empty()) {
    raw = load_json(a.config);
    spec = threshold_spec_from_json(raw);
  }
  if (a.lambda_p) spec.lambda_p = *a.lambda_p;
  if (!a.ratios.empty()) spec.ratios = a.ratios;
  if (a.beta_min || a.beta_max || a.beta_steps || spec.betas.empty()) {
    spec.betas = linspace(a.beta_min.value_or(0.0), a.beta_max.value_or(3.0), a.beta_steps.value_or(301));
  }
  return run_threshold(spec, a.out_dir, out);
}

// ------------------------------------------------------------------ verify

int cmd_verify(const std::string& id, const verify::SuiteOverrides& o, std::ostream& out) {
  std::vector<std::string> ids;
  if (id == "all") {
    ids = verify::suite_ids();
  } else {
    ids = {id};
  }
  bool all = true;
  for (const auto& which : ids) {
    const verify::CheckResult r = verify::run_suite(which, o);
    Json metrics = Json::object();
    for (const auto& [k, v] : r.metrics) metrics[k] = v;
    out << Json{{"id", r.id}, {"passed", r.passed}, {"seconds", r.seconds}, {"metrics", metrics}}.dump()
        << '\n';
    all = all && r.passed;
  }
  return all ? kExitOk : kExitCheckFailed;
}

// -------------------------------------------------------------- experiment

struct ExperimentArgs {
  std::string config;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials, threads;
  std::optional<double> dt, t_end;
  std::vector<double> betas;
  bool trajectories = false;
};

int cmd_experiment(const ExperimentArgs& a, std::ostream& out, std::ostream& err) {
  const Json raw = load_json(a.config);
  const std::string kind = raw.value("kind", "ensemble");
  const std::string name = raw.value("name", fs::path(a.config).stem().string());
  const fs::path dir = a.out_dir.empty() ? fs::path("sal-out") / name : fs::path(a.out_dir);
  if (kind == "threshold") return run_threshold(threshold_spec_from_json(raw), dir, out);
  if (kind != "ensemble") throw ValidationError("experiment: unknown kind '" + kind + "'");

  ExperimentSpec spec = experiment_spec_from_json(raw);
  spec.seed = resolve_seed(a.seed, spec.seed);
  if (a.trials) spec.trials = *a.trials;
  if (a.threads) spec.threads = *a.threads;
  if (a.dt) spec.dt = *a.dt;
  if (a.t_end) spec.t_end = *a.t_end;
  if (!a.betas.empty()) spec.betas = a.betas;
  if (a.trajectories) spec.write_trajectories = true;

  const EnsembleSummary summary = run_experiment(spec, dir);
  write_experiment_outputs(summary, spec, dir);
  const Eigen::Index md = summary.column("m_" + std::to_string(spec.V.rows()));
  const Eigen::Index rho_abs = summary.column("rho_abs");
  const Eigen::Index top = summary.column("top_distance");
  for (const auto& panel : summary.panels) {
    Json line = {{"beta", panel.beta},
                 {"completed", panel.completed},
                 {"consensus_fraction", panel.consensus_fraction},
                 {"polarization_fraction", panel.polarization_fraction}};
    if (panel.mean.rows() > 0) {
      const Eigen::Index last = panel.mean.rows() - 1;
      line["mean_m_d_T"] = panel.mean(last, md);
      line["mean_rho_abs_T"] = panel.mean(last, rho_abs);
      line["mean_top_distance_T"] = panel.mean(last, top);
    }
    out << line.dump() << '\n';
  }
  out << "experiment '" << spec.name << "' written to " << dir.string() << '\n';
  if (summary.any_aborted()) {
    err << "error: some trials stopped on non-finite states (see outcomes.csv)\n";
    return kExitNumeric;
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral analysis of symmetric self-attention dynamics on the sphere", "sal"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kCodeVersion));

  SimulateArgs sim;
  auto* simulate = app.add_subcommand(
      "simulate", "Integrate the token dynamics [particle flow, energy ascent, modal masses]");
  simulate->add_option("--config", sim.config, "JSON run config")->check(CLI::ExistingFile);
  simulate->add_option("--diag", sim.diag, "eigenvalues of a diagonal V (comma separated)")->delimiter(',');
  simulate->add_option("--beta", sim.beta, "attention sharpness");
  simulate->add_option("--dt", sim.dt, "RK4 step");
  simulate->add_option("--t-end", sim.t_end, "final time");
  simulate->add_option("--seed", sim.seed, "sampler seed (overrides SAL_SEED and config)");
  simulate->add_option("--n", sim.n, "number of tokens when sampling");
  simulate->add_option("--record-every", sim.record_every, "steps between snapshots");
  simulate->add_option("--sampler", sim.sampler, "uniform-sphere | one-sided-cone | mixed-sign | consensus | bipolar");
  simulate->add_option("--delta", sim.delta, "cone parameter for one-sided-cone sampling");
  simulate->add_option("--cone", sim.cone_delta, "also write cone diagnostics for this delta");
  simulate->add_option("--out", sim.out_dir, "output directory");

  ReducedArgs red;
  auto* reduced = app.add_subcommand(
      "reduced", "Integrate the consensus or balanced bipolar replicator [invariant manifolds]");
  reduced->add_option("kind", red.kind, "consensus | bipolar")->required();
  reduced->add_option("--lambdas", red.lambdas, "eigenvalues of V")->delimiter(',')->required();
  reduced->add_option("--p0", red.p0, "initial modal masses")->delimiter(',')->required();
  reduced->add_option("--beta", red.beta, "attention sharpness (bipolar)");
  reduced->add_option("--t-end", red.t_end, "final time");
  reduced->add_option("--dt", red.dt, "RK4 step");
  reduced->add_option("--record-every", red.record_every, "steps between rows");
  reduced->add_option("--out", red.out_dir, "output directory");

  StabilityArgs stab;
  auto* stability = app.add_subcommand(
      "stability", "Linear stability of pure-mode equilibria [homogeneous and sign-split states]");
  stability->add_option("--lambdas", stab.lambdas, "eigenvalues of V")->delimiter(',');
  stability->add_option("--beta", stab.beta, "attention sharpness");
  stability->add_option("--pattern", stab.pattern, "signs, e.g. ++- or 1,1,-1");
  stability->add_option("--p", stab.p, "1-based index of the selected eigenvalue");
  stability->add_flag("--sign-split", stab.sign_split, "require a pattern with both signs");
  stability->add_flag("--oracle", stab.oracle, "compare with the finite-difference Jacobian");
  stability->add_flag("--curve", stab.curve, "write the sign-split threshold curve");
  stability->add_option("--lambda-p", stab.lambda_p, "selected eigenvalue for --curve");
  stability->add_option("--r", stab.r, "group ratio n+/n- for --curve");
  stability->add_option("--beta-min", stab.beta_min, "curve grid start");
  stability->add_option("--beta-max", stab.beta_max, "curve grid end");
  stability->add_option("--beta-steps", stab.beta_steps, "curve grid size");
  stability->add_option("--out", stab.out_file, "curve CSV path");

  ThresholdArgs thr;
  auto* threshold = app.add_subcommand(
      "threshold", "Sign-split threshold curves over beta [transverse eigenvalue bound]");
  threshold->add_option("--config", thr.config, "JSON threshold spec")->check(CLI::ExistingFile);
  threshold->add_option("--lambda-p", thr.lambda_p, "selected eigenvalue");
  threshold->add_option("--r", thr.ratios, "group ratios n+/n-")->delimiter(',');
  threshold->add_option("--beta-min", thr.beta_min, "grid start");
  threshold->add_option("--beta-max", thr.beta_max, "grid end");
  threshold->add_option("--beta-steps", thr.beta_steps, "grid size");
  threshold->add_option("--out", thr.out_dir, "output directory");

  std::string verify_id;
  std::optional<int> v_trials;
  std::optional<Eigen::Index> v_n;
  std::optional<double> v_beta, v_delta, v_dt, v_t_end;
  std::optional<std::uint64_t> v_seed;
  auto* verify_cmd = app.add_subcommand(
      "verify", "Run an invariant suite [closed forms, reductions, spectra, selection]");
  std::vector<std::string> choices = verify::suite_ids();
  choices.emplace_back("all");
  verify_cmd->add_option("suite", verify_id, "suite id")->required()->check(CLI::IsMember(choices));
  verify_cmd->add_option("--trials", v_trials, "trials or samples");
  verify_cmd->add_option("--n", v_n, "tokens per trial");
  verify_cmd->add_option("--beta", v_beta, "attention sharpness");
  verify_cmd->add_option("--delta", v_delta, "cone parameter");
  verify_cmd->add_option("--dt", v_dt, "RK4 step");
  verify_cmd->add_option("--t-end", v_t_end, "final time");
  verify_cmd->add_option("--seed", v_seed, "base seed");

  ExperimentArgs exp;
  auto* experiment = app.add_subcommand(
      "experiment", "Run a seeded ensemble or threshold spec [figure pipelines]");
  experiment->add_option("--config", exp.config, "JSON experiment spec")->required()->check(CLI::ExistingFile);
  experiment->add_option("--out", exp.out_dir, "output directory (default sal-out/<name>)");
  experiment->add_option("--seed", exp.seed, "base seed (overrides SAL_SEED and config)");
  experiment->add_option("--trials", exp.trials, "number of trials");
  experiment->add_option("--threads", exp.threads, "worker threads");
  experiment->add_option("--dt", exp.dt, "RK4 step");
  experiment->add_option("--t-end", exp.t_end, "final time");
  experiment->add_option("--betas", exp.betas, "beta list")->delimiter(',');
  experiment->add_flag("--trajectories", exp.trajectories, "write per-trial trajectories");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitValidation;
  }

  try {
    if (*simulate) return cmd_simulate(sim, out, err);
    if (*reduced) return cmd_reduced(red, out);
    if (*stability) return cmd_stability(stab, out);
    if (*threshold) return cmd_threshold(thr, out);
    if (*verify_cmd) {
      verify::SuiteOverrides o{v_trials, v_n, v_beta, v_delta, v_dt, v_t_end, v_seed};
      if (!o.seed) o.seed = env_seed();
      return cmd_verify(verify_id, o, out);
    }
    if (*experiment) return cmd_experiment(exp, out, err);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace sal
