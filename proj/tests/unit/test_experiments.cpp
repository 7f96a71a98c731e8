#include <doctest.h>

#include "sal/config.hpp"
#include "sal/csv.hpp"
#include "sal/errors.hpp"
#include "sal/experiments.hpp"
#include "sal/rng.hpp"
#include "sal/spectral.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

sal::Spectrum diag_spectrum(std::vector<double> lambdas) { return sal::spectrum_from_diagonal(lambdas); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("sal_test_" + name);
  fs::remove_all(dir);
  return dir;
}

sal::ExperimentSpec small_spec() {
  sal::ExperimentSpec spec;
  spec.name = "small";
  spec.n = 6;
  spec.betas = {0.5, 2.0};
  spec.V = Eigen::Vector3d(1.0, 0.2, -0.6).asDiagonal();
  spec.sampler.kind = sal::Sampler::MixedSign;
  spec.trials = 5;
  spec.t_end = 2.0;
  spec.dt = 0.05;
  spec.record_every = 4;
  spec.seed = 99;
  return spec;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("mt19937_64 reference value") {
  // The standard pins the 10000th output of a default-seeded engine.
  sal::Rng rng(5489u);
  std::uint64_t v = 0;
  for (int k = 0; k < 10000; ++k) v = rng.next_u64();
  CHECK(v == 9981545732273789042ULL);
}

TEST_CASE("uniforms lie in [0, 1) and streams are reproducible") {
  sal::Rng a(7), b(7), c(8);
  bool differs = false;
  for (int k = 0; k < 1000; ++k) {
    const double u = a.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(u == b.uniform());
    differs = differs || u != c.uniform();
  }
  CHECK(differs);
  CHECK(sal::trial_seed(10, 3) == 13);
}

TEST_CASE("normals have unit variance") {
  sal::Rng rng(11);
  const int count = 200000;
  double sum = 0.0, sq = 0.0;
  for (int k = 0; k < count; ++k) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / count) < 5.0 / std::sqrt(count));
  CHECK(std::abs(sq / count - 1.0) < 0.02);
}

TEST_CASE("sampler is deterministic per seed") {
  const auto s = diag_spectrum({1.0, 0.0, -1.0});
  for (auto kind : {sal::Sampler::UniformSphere, sal::Sampler::OneSidedCone, sal::Sampler::MixedSign,
                    sal::Sampler::Consensus, sal::Sampler::Bipolar}) {
    const sal::SamplerOptions opts{.kind = kind};
    const auto a = sal::sample_initial(opts, 8, s, 42);
    const auto b = sal::sample_initial(opts, 8, s, 42);
    const auto c = sal::sample_initial(opts, 8, s, 43);
    CHECK(sal::hash_states(a.states) == sal::hash_states(b.states));
    CHECK(sal::hash_states(a.states) != sal::hash_states(c.states));
    CHECK((a.states.rowwise().norm().array() - 1.0).abs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("uniform sampler is isotropic") {
  const auto s = diag_spectrum({1.0, 0.0, -1.0});
  const Eigen::Index n = 100000;
  const auto cfg = sal::sample_initial({}, n, s, 2024);
  const Eigen::RowVectorXd mean = cfg.states.colwise().mean();
  const Eigen::RowVectorXd second = cfg.states.cwiseAbs2().colwise().mean();
  const double se = 1.0 / std::sqrt(3.0 * static_cast<double>(n));
  CHECK(mean.cwiseAbs().maxCoeff() < 4.0 * se);
  CHECK((second.array() - 1.0 / 3.0).abs().maxCoeff() < 0.01);
  const Eigen::MatrixXd cov = cfg.states.transpose() * cfg.states / static_cast<double>(n);
  CHECK(std::abs(cov(0, 1)) < 0.01);
}

TEST_CASE("cone sampler respects delta and orientation in eigen-coordinates") {
  Eigen::Matrix2d rot;
  rot << std::cos(0.3), -std::sin(0.3), std::sin(0.3), std::cos(0.3);
  const auto s = sal::Spectrum::from_parts(Eigen::Vector2d(1.5, 0.5), rot);
  const auto up = sal::sample_initial({.kind = sal::Sampler::OneSidedCone, .delta = 0.4}, 500, s, 1);
  CHECK((up.states * s.basis).col(0).minCoeff() >= 0.4 - 1e-14);
  const auto down =
      sal::sample_initial({.kind = sal::Sampler::OneSidedCone, .delta = 0.4, .orientation = -1}, 500, s, 1);
  CHECK((down.states * s.basis).col(0).maxCoeff() <= -0.4 + 1e-14);
  CHECK_THROWS_AS((void)sal::sample_initial({.kind = sal::Sampler::OneSidedCone, .delta = 1.0}, 5, s, 1),
                  sal::ValidationError);
}

TEST_CASE("structured samplers") {
  const auto s = diag_spectrum({1.0, 0.0, -1.0});
  const auto mixed = sal::sample_initial({.kind = sal::Sampler::MixedSign}, 4, s, 3);
  CHECK(mixed.states.col(0).minCoeff() < 0.0);
  CHECK(mixed.states.col(0).maxCoeff() > 0.0);
  const auto cons = sal::sample_initial({.kind = sal::Sampler::Consensus}, 4, s, 3);
  CHECK((cons.states.rowwise() - cons.states.row(0)).cwiseAbs().maxCoeff() == 0.0);
  const auto bip = sal::sample_initial({.kind = sal::Sampler::Bipolar}, 4, s, 3);
  CHECK((bip.states.row(0) + bip.states.row(3)).norm() == 0.0);
  CHECK_THROWS_AS((void)sal::sample_initial({.kind = sal::Sampler::Bipolar}, 3, s, 3), sal::ValidationError);
  CHECK_THROWS_AS((void)sal::parse_sampler("gaussian"), sal::ValidationError);
  CHECK(sal::parse_sampler("one-sided-cone") == sal::Sampler::OneSidedCone);
}

TEST_CASE("panels share initial data across beta") {
  const auto summary = sal::run_experiment(small_spec());
  REQUIRE(summary.panels.size() == 2);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(summary.panels[0].trials[k].initial_hash == summary.panels[1].trials[k].initial_hash);
  }
  CHECK(summary.panels[0].trials[0].initial_hash != summary.panels[0].trials[1].initial_hash);
}

TEST_CASE("panel statistics are the mean and population deviation over trials") {
  const auto summary = sal::run_experiment(small_spec());
  const auto& panel = summary.panels[1];
  const Eigen::Index col = summary.column("rho_abs");
  const Eigen::Index last = panel.mean.rows() - 1;
  double sum = 0.0, sq = 0.0;
  for (const auto& t : panel.trials) sum += t.values(last, col);
  const double mean = sum / 5.0;
  for (const auto& t : panel.trials) sq += (t.values(last, col) - mean) * (t.values(last, col) - mean);
  CHECK(panel.mean(last, col) == doctest::Approx(mean).epsilon(1e-14));
  CHECK(panel.stddev(last, col) == doctest::Approx(std::sqrt(sq / 5.0)).epsilon(1e-12));
  CHECK(panel.completed == 5);
  CHECK(panel.times.back() == 2.0);
  CHECK_FALSE(summary.any_aborted());
  CHECK_THROWS_AS((void)summary.column("nope"), sal::ValidationError);
}

TEST_CASE("reruns and thread counts give byte-identical outputs") {
  auto spec = small_spec();
  spec.write_trajectories = true;
  const fs::path a = scratch("rerun_a"), b = scratch("rerun_b"), c = scratch("rerun_c");
  sal::write_experiment_outputs(sal::run_experiment(spec, a), spec, a);
  sal::write_experiment_outputs(sal::run_experiment(spec, b), spec, b);
  spec.threads = 3;
  sal::write_experiment_outputs(sal::run_experiment(spec, c), spec, c);
  for (const char* f : {"observables.csv", "summary.csv", "outcomes.csv", "manifest.json",
                        "trajectories/beta1_trial4.csv"}) {
    CAPTURE(f);
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
    CHECK(slurp(a / f) == slurp(c / f));
  }
}

TEST_CASE("manifest records the seed, hash and version") {
  const auto spec = small_spec();
  const fs::path dir = scratch("manifest");
  sal::write_experiment_outputs(sal::run_experiment(spec), spec, dir);
  const auto m = sal::load_json(dir / "manifest.json");
  CHECK(m.at("seed").get<std::uint64_t>() == 99);
  CHECK(m.at("code_version").get<std::string>() == std::string(sal::kCodeVersion));
  CHECK(m.at("spec_hash").get<std::string>() == sal::spec_hash(sal::to_json(spec)));
}

TEST_CASE("spec round trips through JSON") {
  const auto spec = small_spec();
  const auto back = sal::experiment_spec_from_json(sal::to_json(spec));
  CHECK(back.n == spec.n);
  CHECK(back.betas == spec.betas);
  CHECK(back.V == spec.V);
  CHECK(back.sampler.kind == spec.sampler.kind);
  CHECK(sal::spec_hash(sal::to_json(back)) == sal::spec_hash(sal::to_json(spec)));
  CHECK(sal::spec_hash(sal::to_json(spec)).size() == 16);
}

TEST_CASE("bundled configs load") {
  const fs::path dir = SAL_CONFIG_DIR;
  for (const char* name : {"fig1.json", "fig2.json", "fig3.json", "fig4.json"}) {
    CAPTURE(name);
    const auto spec = sal::experiment_spec_from_json(sal::load_json(dir / name));
    CHECK_NOTHROW(spec.validate());
  }
  const auto th = sal::threshold_spec_from_json(sal::load_json(dir / "fig5.json"));
  CHECK(th.ratios == std::vector<double>{1.0, 2.0, 4.0});
  CHECK(th.betas.size() == 301);
}

TEST_CASE("config errors") {
  auto j = sal::to_json(small_spec());
  j["bogus"] = 1;
  CHECK_THROWS_AS((void)sal::experiment_spec_from_json(j), sal::ValidationError);
  sal::Json both = {{"V", {{1.0}}}, {"diag", {1.0}}};
  CHECK_THROWS_AS((void)sal::parse_interaction(both), sal::ValidationError);
  sal::Json ragged = {{"V", {{1.0, 0.0}, {0.0}}}};
  CHECK_THROWS_AS((void)sal::parse_interaction(ragged), sal::ValidationError);
}

TEST_CASE("linspace endpoints") {
  const auto v = sal::linspace(0.0, 3.0, 301);
  CHECK(v.front() == 0.0);
  CHECK(v.back() == 3.0);
  CHECK(v[100] == doctest::Approx(1.0));
}

TEST_CASE("csv formatting and reading") {
  CHECK(sal::format_double(0.1) == "0.1");
  CHECK(sal::format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(sal::format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(sal::format_double(std::nan("")) == "nan");
  const fs::path dir = scratch("csv");
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "m.csv");
    out << "# comment\nx,y\n1,2\n\n3,4.5\n";
  }
  const Eigen::MatrixXd m = sal::read_matrix_csv(dir / "m.csv");
  REQUIRE(m.rows() == 2);
  CHECK(m(1, 1) == 4.5);
  {
    std::ofstream out(dir / "bad.csv");
    out << "1,2\n3\n";
  }
  CHECK_THROWS_AS((void)sal::read_matrix_csv(dir / "bad.csv"), sal::ValidationError);
}

}  // TEST_SUITE
