#include "sal/config.hpp"

#include "sal/csv.hpp"
#include "sal/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

namespace sal {

namespace {

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected a JSON object");
  for (const auto& item : j.items()) {
    if (!allowed.contains(item.key())) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      throw ValidationError(where + ": unknown key '" + item.key() + "' (allowed: " + list + ")");
    }
  }
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("config key '") + key + "': " + e.what());
  }
}

std::vector<double> parse_betas(const Json& j, std::vector<double> fallback) {
  if (j.contains("beta") && j.contains("betas")) {
    throw ValidationError("config: give either 'beta' or 'betas', not both");
  }
  if (j.contains("beta")) return {get_or<double>(j, "beta", 1.0)};
  if (j.contains("betas")) return get_or<std::vector<double>>(j, "betas", {});
  return fallback;
}

const std::set<std::string> kRunKeys = {
    "name", "kind", "n", "d", "beta", "betas", "V", "diag", "initial", "trials",
    "t_end", "dt", "seed", "record_every", "consensus_cutoff", "polarization_cutoff",
    "write_trajectories", "threads", "record_energy", "note"};

}  // namespace

Json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path.string());
  try {
    return Json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

Eigen::MatrixXd parse_matrix(const Json& j, const std::string& what) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    throw ValidationError(what + ": expected a non-empty array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ValidationError(what + ": ragged row " + std::to_string(i));
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      const Json& v = row[static_cast<std::size_t>(k)];
      if (!v.is_number()) throw ValidationError(what + ": non-numeric entry");
      m(i, k) = v.get<double>();
    }
  }
  return m;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    out.push_back(std::move(row));
  }
  return out;
}

Eigen::MatrixXd parse_interaction(const Json& config) {
  const bool dense = config.contains("V");
  const bool diag = config.contains("diag");
  if (dense == diag) throw ValidationError("config: exactly one of 'V' or 'diag' is required");
  if (dense) return parse_matrix(config.at("V"), "V");
  const auto values = get_or<std::vector<double>>(config, "diag", {});
  if (values.empty()) throw ValidationError("config: 'diag' must be non-empty");
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()))
      .asDiagonal();
}

InitialData parse_initial(const Json& j, const std::filesystem::path& base_dir) {
  check_keys(j, {"sampler", "delta", "orientation", "states", "file"}, "initial");
  InitialData out;
  const int sources = int(j.contains("sampler")) + int(j.contains("states")) + int(j.contains("file"));
  if (sources != 1) {
    throw ValidationError("initial: exactly one of 'sampler', 'states' or 'file' is required");
  }
  if (j.contains("sampler")) {
    out.sampler.kind = parse_sampler(get_or<std::string>(j, "sampler", ""));
    out.sampler.delta = get_or<double>(j, "delta", out.sampler.delta);
    out.sampler.orientation = get_or<int>(j, "orientation", 1);
    if (out.sampler.orientation != 1 && out.sampler.orientation != -1) {
      throw ValidationError("initial: orientation must be 1 or -1");
    }
  } else if (j.contains("states")) {
    out.states = parse_matrix(j.at("states"), "initial.states");
  } else {
    std::filesystem::path file = get_or<std::string>(j, "file", "");
    if (file.is_relative()) file = base_dir / file;
    out.states = read_matrix_csv(file);
  }
  return out;
}

SimulationConfig simulation_config_from_json(const Json& j, const std::filesystem::path& base_dir) {
  check_keys(j, kRunKeys, "config");
  SimulationConfig c;
  c.V = parse_interaction(j);
  const auto betas = parse_betas(j, {1.0});
  if (betas.size() != 1) throw ValidationError("simulate: a single beta is required");
  c.beta = betas.front();
  c.initial = j.contains("initial") ? parse_initial(j.at("initial"), base_dir) : InitialData{};
  c.n = get_or<Eigen::Index>(j, "n", c.initial.states ? c.initial.states->rows() : 2);
  if (c.initial.states && c.initial.states->rows() != c.n) {
    throw ValidationError("config: 'n' does not match the number of initial states");
  }
  if (j.contains("d") && get_or<Eigen::Index>(j, "d", 0) != c.V.rows()) {
    throw ValidationError("config: 'd' does not match the size of V");
  }
  c.integration.t_end = get_or<double>(j, "t_end", c.integration.t_end);
  c.integration.dt = get_or<double>(j, "dt", c.integration.dt);
  c.integration.record_every = get_or<int>(j, "record_every", 1);
  c.integration.record_energy = get_or<bool>(j, "record_energy", true);
  c.seed = get_or<std::uint64_t>(j, "seed", 0);
  return c;
}

ExperimentSpec experiment_spec_from_json(const Json& j) {
  check_keys(j, kRunKeys, "experiment");
  ExperimentSpec s;
  s.name = get_or<std::string>(j, "name", s.name);
  s.V = parse_interaction(j);
  s.betas = parse_betas(j, s.betas);
  if (j.contains("initial")) {
    const InitialData init = parse_initial(j.at("initial"), {});
    if (init.states) throw ValidationError("experiment: initial data must come from a sampler");
    s.sampler = init.sampler;
  }
  s.n = get_or<Eigen::Index>(j, "n", s.n);
  if (j.contains("d") && get_or<Eigen::Index>(j, "d", 0) != s.V.rows()) {
    throw ValidationError("experiment: 'd' does not match the size of V");
  }
  s.trials = get_or<int>(j, "trials", s.trials);
  s.t_end = get_or<double>(j, "t_end", s.t_end);
  s.dt = get_or<double>(j, "dt", s.dt);
  s.seed = get_or<std::uint64_t>(j, "seed", s.seed);
  s.record_every = get_or<int>(j, "record_every", s.record_every);
  s.consensus_cutoff = get_or<double>(j, "consensus_cutoff", s.consensus_cutoff);
  s.polarization_cutoff = get_or<double>(j, "polarization_cutoff", s.polarization_cutoff);
  s.write_trajectories = get_or<bool>(j, "write_trajectories", s.write_trajectories);
  s.threads = get_or<int>(j, "threads", s.threads);
  return s;
}

Json to_json(const ExperimentSpec& s) {
  Json init = {{"sampler", std::string(to_string(s.sampler.kind))}};
  if (s.sampler.kind == Sampler::OneSidedCone) {
    init["delta"] = s.sampler.delta;
    init["orientation"] = s.sampler.orientation;
  }
  // threads is omitted: it never changes the output.
  return Json{{"name", s.name},
              {"n", s.n},
              {"V", matrix_to_json(s.V)},
              {"betas", s.betas},
              {"initial", init},
              {"trials", s.trials},
              {"t_end", s.t_end},
              {"dt", s.dt},
              {"seed", s.seed},
              {"record_every", s.record_every},
              {"consensus_cutoff", s.consensus_cutoff},
              {"polarization_cutoff", s.polarization_cutoff},
              {"write_trajectories", s.write_trajectories}};
}

ThresholdSpec threshold_spec_from_json(const Json& j) {
  check_keys(j, {"name", "kind", "lambda_p", "ratios", "betas", "beta_min", "beta_max", "beta_steps",
                 "note"},
             "threshold");
  ThresholdSpec s;
  s.name = get_or<std::string>(j, "name", s.name);
  s.lambda_p = get_or<double>(j, "lambda_p", s.lambda_p);
  s.ratios = get_or<std::vector<double>>(j, "ratios", s.ratios);
  if (j.contains("betas")) {
    s.betas = get_or<std::vector<double>>(j, "betas", {});
  } else {
    s.betas = linspace(get_or<double>(j, "beta_min", 0.0), get_or<double>(j, "beta_max", 3.0),
                       get_or<int>(j, "beta_steps", 301));
  }
  return s;
}

Json to_json(const ThresholdSpec& s) {
  return Json{{"name", s.name}, {"kind", "threshold"}, {"lambda_p", s.lambda_p},
              {"ratios", s.ratios}, {"betas", s.betas}};
}

std::vector<double> linspace(double lo, double hi, int count) {
  if (count < 1) throw ValidationError("linspace: count must be >= 1");
  if (!(hi >= lo)) throw ValidationError("linspace: need hi >= lo");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] =
        count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return out;
}

std::string spec_hash(const Json& j) {
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace sal
