#include <doctest.h>

#include "sal/cli.hpp"
#include "sal/config.hpp"
#include "sal/csv.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = sal::run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("sal_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path;
}

std::size_t line_count(const fs::path& path) {
  std::ifstream in(path);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help lists every subcommand") {
  const auto r = run({"--help"});
  CHECK(r.code == 0);
  for (const char* cmd : {"simulate", "reduced", "stability", "threshold", "verify", "experiment"}) {
    CHECK(r.out.find(cmd) != std::string::npos);
  }
}

TEST_CASE("simulate with t_end 0 writes the initial snapshot") {
  const fs::path dir = scratch("sim0");
  const auto r = run({"simulate", "--diag", "1.5,0.5,-0.5", "--n", "7", "--t-end", "0", "--seed", "3",
                      "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(line_count(dir / "trajectory.csv") == 8);
  CHECK(fs::exists(dir / "energy.csv"));
  CHECK(fs::exists(dir / "masses.csv"));
  CHECK(sal::load_json(dir / "manifest.json").at("seed").get<int>() == 3);
}

TEST_CASE("simulate with cone diagnostics") {
  const fs::path dir = scratch("cone");
  const auto r = run({"simulate", "--diag", "1.5,0.5,-0.5", "--n", "10", "--sampler", "one-sided-cone",
                      "--delta", "0.1", "--cone", "0.1", "--t-end", "1", "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "cone.csv"));
}

TEST_CASE("asymmetric V exits with a validation error") {
  const fs::path dir = scratch("asym");
  const auto cfg = write_file(dir / "run.json",
                              R"({"V": [[1.0, 0.5], [0.0, -1.0]], "beta": 1.0, "n": 3, "t_end": 1.0})");
  const auto r = run({"simulate", "--config", cfg.string(), "--out", (dir / "o").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("V = V^T") != std::string::npos);
}

TEST_CASE("initial states from a file") {
  const fs::path dir = scratch("states");
  write_file(dir / "x.csv", "x1,x2\n1,0\n0,1\n");
  const auto cfg = write_file(dir / "run.json",
                              R"({"diag": [1.0, -1.0], "beta": 1.0, "initial": {"file": "x.csv"}, "t_end": 0.5})");
  const auto r = run({"simulate", "--config", cfg.string(), "--out", (dir / "o").string()});
  CHECK(r.code == 0);
  CHECK(line_count(dir / "o" / "trajectory.csv") > 2);
}

TEST_CASE("SAL_SEED is used when no flag is given") {
  const fs::path dir = scratch("envseed");
  ::setenv("SAL_SEED", "1234", 1);
  const auto r = run({"simulate", "--diag", "1,-1", "--n", "3", "--t-end", "0", "--out", dir.string()});
  ::unsetenv("SAL_SEED");
  CHECK(r.code == 0);
  CHECK(sal::load_json(dir / "manifest.json").at("seed").get<int>() == 1234);
}

TEST_CASE("stability reports gamma for two tokens") {
  const auto r = run({"stability", "--lambdas", "1,0.2", "--beta", "1", "--pattern", "+-", "--p", "1",
                      "--sign-split", "--oracle"});
  REQUIRE(r.code == 0);
  const auto j = sal::Json::parse(r.out);
  CHECK(j.at("gamma_plus").get<double>() == doctest::Approx(std::tanh(1.0)).epsilon(1e-14));
  CHECK(j.at("oracle_distance").get<double>() < 1e-6);
  CHECK(j.at("spectral_verdict").get<std::string>() == "stable");
}

TEST_CASE("homogeneous stability report") {
  const auto r = run({"stability", "--lambdas", "2,1", "--pattern", "+++", "--p", "2"});
  REQUIRE(r.code == 0);
  CHECK(sal::Json::parse(r.out).at("verdict").get<std::string>() == "unstable");
}

TEST_CASE("stability rejects bad input") {
  CHECK(run({"stability", "--lambdas", "1,0", "--pattern", "++", "--sign-split"}).code == 2);
  CHECK(run({"stability", "--curve", "--r", "0"}).code == 2);
  CHECK(run({"stability", "--lambdas", "1,0", "--p", "3"}).code == 2);
  CHECK(run({"stability", "--lambdas", "1,0", "--pattern", "+?"}).code == 2);
}

TEST_CASE("threshold curve at r = 1 is tanh") {
  const fs::path dir = scratch("curve");
  const auto r = run({"stability", "--curve", "--lambda-p", "1", "--r", "1", "--beta-min", "0", "--beta-max",
                      "2", "--beta-steps", "21", "--out", (dir / "c.csv").string()});
  REQUIRE(r.code == 0);
  const Eigen::MatrixXd m = sal::read_matrix_csv(dir / "c.csv");
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    CHECK(m(i, 1) == doctest::Approx(std::tanh(m(i, 0))).epsilon(1e-14));
  }
}

TEST_CASE("threshold subcommand writes one curve per ratio") {
  const fs::path dir = scratch("threshold");
  const auto r = run({"threshold", "--lambda-p", "1", "--r", "1,2,4", "--beta-steps", "11", "--out",
                      dir.string()});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "threshold_r1.csv"));
  CHECK(fs::exists(dir / "threshold_r2.csv"));
  CHECK(fs::exists(dir / "threshold_r4.csv"));
  CHECK(fs::exists(dir / "manifest.json"));
}

TEST_CASE("reduced subcommands") {
  const fs::path dir = scratch("reduced");
  const auto c = run({"reduced", "consensus", "--lambdas", "1,0,-1", "--p0", "0.2,0.3,0.5", "--t-end", "2",
                      "--out", dir.string()});
  REQUIRE(c.code == 0);
  CHECK(sal::Json::parse(c.out).at("p_limit")[0].get<double>() == 1.0);
  const auto b = run({"reduced", "bipolar", "--lambdas", "1,0,-1", "--p0", "0.1,0.3,0.6", "--out",
                      dir.string()});
  REQUIRE(b.code == 0);
  CHECK(sal::Json::parse(b.out).at("regime").get<std::string>() == "decreasing");
  CHECK(run({"reduced", "bipolar", "--lambdas", "1,0", "--p0", "0.7,0.7"}).code == 2);
}

TEST_CASE("verify prints one JSON line") {
  const auto r = run({"verify", "xi"});
  CHECK(r.code == 0);
  const auto j = sal::Json::parse(r.out);
  CHECK(j.at("passed").get<bool>());
  CHECK(run({"verify", "no-such-suite"}).code == 2);
}

TEST_CASE("experiment subcommand") {
  const fs::path dir = scratch("experiment");
  const auto spec = write_file(dir / "spec.json", R"({
    "name": "tiny", "n": 4, "diag": [1.0, -0.5], "betas": [1.0],
    "initial": {"sampler": "uniform-sphere"}, "trials": 3, "t_end": 1.0, "dt": 0.1,
    "record_every": 5, "seed": 17
  })");
  const auto r = run({"experiment", "--config", spec.string(), "--out", (dir / "o").string(), "--seed", "5"});
  REQUIRE(r.code == 0);
  CHECK(sal::load_json(dir / "o" / "manifest.json").at("seed").get<int>() == 5);
  CHECK(fs::exists(dir / "o" / "summary.csv"));
}

TEST_CASE("experiment with a threshold spec") {
  const fs::path dir = scratch("exp_threshold");
  const auto r = run({"experiment", "--config", (fs::path(SAL_CONFIG_DIR) / "fig5.json").string(), "--out",
                      dir.string()});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "threshold_r2.csv"));
}

TEST_CASE("missing config file is a validation error") {
  CHECK(run({"experiment", "--config", "/nonexistent/spec.json"}).code == 2);
}

}  // TEST_SUITE
