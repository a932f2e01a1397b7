#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "decoh/rng.hpp"
#include "decoh/spin_model.hpp"

namespace decoh {

enum class InitialState { X, UDUDY };

const char* to_string(InitialState s);
InitialState parse_initial_state(std::string_view text);

/// Everything needed to reproduce one trajectory. Serialized as JSON with
/// a schema tag; unknown keys are rejected on load.
struct ExperimentConfig {
  int n_system = 4;
  int n_env = 8;
  CouplingCase coupling_case = CouplingCase::I;
  double j_system = -0.15;
  double omega_max = 0.2;
  double delta_max = 0.2;
  RngSeeds seeds;

  int swb_env_count = 0;
  int swb_se_count = 0;
  int k_max = 1;
  bool all_to_all_env = false;
  int random_bond_count = 0;

  InitialState initial_state = InitialState::X;
  double tau = 3.141592653589793;
  /// Unset: 200/|J| for "X" runs, 1000/|J| for UDUDY runs.
  std::optional<double> t_max;
  /// Unset: the second half of [0, t_max].
  std::optional<double> t_avg_start;
  double epsilon = 1e-15;

  bool track_components = false;
  int workers = 0;  // 0 = OpenMP default
  int max_qubits = 24;
  std::string output;  // CSV path; empty = no files

  double resolved_t_max() const;
  double resolved_t_avg_start() const;

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

inline constexpr std::string_view kConfigSchema = "decoh-experiment/1";

ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::string& path);
std::string to_json(const ExperimentConfig& config);

}  // namespace decoh
