#include "decoh/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace decoh {

namespace {

using nlohmann::json;

const std::set<std::string> kKnownKeys = {
    "schema",        "n_system",      "n_env",          "case",
    "j_system",      "omega_max",     "delta_max",      "seeds",
    "swb_env_count", "swb_se_count",  "k_max",          "all_to_all_env",
    "random_bond_count", "initial_state", "tau",        "t_max",
    "t_avg_start",   "epsilon",       "track_components", "workers",
    "max_qubits",    "output"};

const std::set<std::string> kSeedKeys = {"couplings", "state", "swb_env", "swb_se",
                                         "random_bonds"};

template <class T>
void read_if(const json& j, const char* key, T& target) {
  if (j.contains(key)) target = j.at(key).get<T>();
}

}  // namespace

const char* to_string(InitialState s) { return s == InitialState::X ? "X" : "UDUDY"; }

InitialState parse_initial_state(std::string_view text) {
  if (text == "X") return InitialState::X;
  if (text == "UDUDY") return InitialState::UDUDY;
  throw std::invalid_argument("unknown initial state '" + std::string(text) + "'");
}

double ExperimentConfig::resolved_t_max() const {
  if (t_max) return *t_max;
  const double scale = initial_state == InitialState::X ? 200.0 : 1000.0;
  return scale / std::abs(j_system);
}

double ExperimentConfig::resolved_t_avg_start() const {
  return t_avg_start ? *t_avg_start : 0.5 * resolved_t_max();
}

void ExperimentConfig::validate() const {
  if (n_system < 1 || n_env < 1) throw std::invalid_argument("config: site counts must be >= 1");
  if (n_system + n_env > max_qubits)
    throw std::invalid_argument("config: N = " + std::to_string(n_system + n_env) +
                                " exceeds max_qubits = " + std::to_string(max_qubits));
  if (!(tau > 0.0)) throw std::invalid_argument("config: tau must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("config: epsilon in (0,1)");
  if (j_system == 0.0 && !t_max)
    throw std::invalid_argument("config: t_max must be given when j_system = 0");
  const double tm = resolved_t_max();
  if (!(tm > 0.0)) throw std::invalid_argument("config: t_max must be positive");
  if (!(resolved_t_avg_start() < tm))
    throw std::invalid_argument("config: t_avg_start must be below t_max");
  if (swb_env_count < 0 || swb_se_count < 0 || random_bond_count < 0)
    throw std::invalid_argument("config: counts must be non-negative");
  if (k_max < 1) throw std::invalid_argument("config: k_max must be >= 1");
  if (random_bond_count > 0 && coupling_case != CouplingCase::II)
    throw std::invalid_argument("config: random bonds apply to case II models only");
  if (initial_state == InitialState::UDUDY && n_system != 4)
    throw std::invalid_argument("config: UDUDY needs n_system = 4");
}

ExperimentConfig parse_config(std::string_view json_text) {
  const json j = json::parse(json_text);
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  for (const auto& [key, value] : j.items())
    if (!kKnownKeys.contains(key)) throw std::invalid_argument("config: unknown key '" + key + "'");
  if (j.contains("schema") && j.at("schema").get<std::string>() != kConfigSchema)
    throw std::invalid_argument("config: unsupported schema '" +
                                j.at("schema").get<std::string>() + "'");

  ExperimentConfig c;
  read_if(j, "n_system", c.n_system);
  read_if(j, "n_env", c.n_env);
  if (j.contains("case")) c.coupling_case = parse_coupling_case(j.at("case").get<std::string>());
  read_if(j, "j_system", c.j_system);
  read_if(j, "omega_max", c.omega_max);
  read_if(j, "delta_max", c.delta_max);
  if (j.contains("seeds")) {
    const json& s = j.at("seeds");
    for (const auto& [key, value] : s.items())
      if (!kSeedKeys.contains(key))
        throw std::invalid_argument("config: unknown seed stream '" + key + "'");
    read_if(s, "couplings", c.seeds.couplings);
    read_if(s, "state", c.seeds.state);
    read_if(s, "swb_env", c.seeds.swb_env);
    read_if(s, "swb_se", c.seeds.swb_se);
    read_if(s, "random_bonds", c.seeds.random_bonds);
  }
  read_if(j, "swb_env_count", c.swb_env_count);
  read_if(j, "swb_se_count", c.swb_se_count);
  read_if(j, "k_max", c.k_max);
  read_if(j, "all_to_all_env", c.all_to_all_env);
  read_if(j, "random_bond_count", c.random_bond_count);
  if (j.contains("initial_state"))
    c.initial_state = parse_initial_state(j.at("initial_state").get<std::string>());
  read_if(j, "tau", c.tau);
  if (j.contains("t_max")) c.t_max = j.at("t_max").get<double>();
  if (j.contains("t_avg_start")) c.t_avg_start = j.at("t_avg_start").get<double>();
  read_if(j, "epsilon", c.epsilon);
  read_if(j, "track_components", c.track_components);
  read_if(j, "workers", c.workers);
  read_if(j, "max_qubits", c.max_qubits);
  read_if(j, "output", c.output);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string to_json(const ExperimentConfig& c) {
  json j;
  j["schema"] = kConfigSchema;
  j["n_system"] = c.n_system;
  j["n_env"] = c.n_env;
  j["case"] = to_string(c.coupling_case);
  j["j_system"] = c.j_system;
  j["omega_max"] = c.omega_max;
  j["delta_max"] = c.delta_max;
  j["seeds"] = {{"couplings", c.seeds.couplings},
                {"state", c.seeds.state},
                {"swb_env", c.seeds.swb_env},
                {"swb_se", c.seeds.swb_se},
                {"random_bonds", c.seeds.random_bonds}};
  j["swb_env_count"] = c.swb_env_count;
  j["swb_se_count"] = c.swb_se_count;
  j["k_max"] = c.k_max;
  j["all_to_all_env"] = c.all_to_all_env;
  j["random_bond_count"] = c.random_bond_count;
  j["initial_state"] = to_string(c.initial_state);
  j["tau"] = c.tau;
  j["t_max"] = c.resolved_t_max();
  j["t_avg_start"] = c.resolved_t_avg_start();
  j["epsilon"] = c.epsilon;
  j["track_components"] = c.track_components;
  j["workers"] = c.workers;
  j["max_qubits"] = c.max_qubits;
  j["output"] = c.output;
  return j.dump(2);
}

}  // namespace decoh
