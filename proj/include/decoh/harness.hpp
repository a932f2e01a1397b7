#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "decoh/config.hpp"
#include "decoh/observables.hpp"
#include "decoh/propagator.hpp"
#include "decoh/spin_model.hpp"

namespace decoh {

/// Observables of one recorded time step. `moduli` holds |rho~_ij| for
/// i <= j in row-major order when component tracking is on.
struct TimeSeriesRecord {
  double t = 0.0;
  double sigma = 0.0;
  double delta_fitted = 0.0;  // NaN when the populations cannot be fitted
  double delta_uniform = 0.0;
  double b_fitted = 0.0;      // NaN with delta_fitted
  double purity = 0.0;
  double trace_diag_sq = 0.0;
  double energy = 0.0;
  double norm_error = 0.0;
  std::vector<double> moduli;
};

inline constexpr double kMaxNormError = 1e-9;

struct Trajectory {
  ModelSpec model;
  ChebyshevPlan plan;
  std::vector<TimeSeriesRecord> records;
};

/// Builds the model in the fixed order ring -> environment SWBs ->
/// system-environment SWBs -> all-to-all environment -> random bonds.
ModelSpec build_model(const ExperimentConfig& config);

StateVector initial_state(const ExperimentConfig& config);

/// Steps e^{-i tau H} from t = 0 to t_max, recording every step. When
/// config.output is set, writes the CSV incrementally plus
/// "<output>.model" and "<output>.manifest.json". Throws std::runtime_error
/// if any record's norm error reaches 1e-9.
Trajectory run_evolution(const ExperimentConfig& config);

/// run_evolution with per-element moduli recorded.
Trajectory track_components(ExperimentConfig config);

struct TimeWindow {
  double start = 0.0;
  double end = 0.0;
};

struct TimeAverages {
  double sigma = 0.0;
  double delta_uniform = 0.0;
  double delta_fitted = 0.0;  // over records where the fit exists; NaN if none
  double b_fitted = 0.0;
  std::size_t samples = 0;
};

inline constexpr std::size_t kMinAverageSamples = 10;

/// Arithmetic means over records with start <= t <= end.
TimeAverages time_average(const std::vector<TimeSeriesRecord>& records, TimeWindow window);

/// Largest |E(t) - E(0)| / |E(0)| over the trajectory (absolute drift when
/// E(0) = 0).
double max_relative_energy_drift(const std::vector<TimeSeriesRecord>& records);
double max_norm_error(const std::vector<TimeSeriesRecord>& records);

struct SweepRow {
  int n_env = 0;
  double sigma_bar = 0.0;
  double predicted_sigma = 0.0;
  double ratio = 0.0;
  double delta_bar_uniform = 0.0;
  double predicted_delta = 0.0;
  double max_norm_error = 0.0;
  double max_energy_drift = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double slope = 0.0;  // least-squares slope of ln(sigma_bar) against N_E
};

/// One trajectory per N_E. When the template has an output path, each run
/// writes "<stem>_ne<N_E>.csv" and the table goes to "<stem>_sweep.csv".
SweepResult scaling_sweep(const ExperimentConfig& config_template,
                          const std::vector<int>& n_env_list);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

struct McEstimate {
  std::size_t samples = 0;
  double mean_two_sigma_sq = 0.0;
  double se_two_sigma_sq = 0.0;
  double target_two_sigma_sq = 0.0;
  // Only with an environment: populations against the uniform profile.
  double mean_delta_sq = 0.0;
  double se_delta_sq = 0.0;
  double target_delta_sq = 0.0;
};

inline constexpr std::uint64_t kMaxMcDim = std::uint64_t{1} << 24;

/// Monte-Carlo over random hypersphere states of dimension D_S * D_E
/// (or D_S alone without an environment, where sigma is taken on the
/// rank-1 density matrix of the whole state). Sample k draws from its own
/// stream derived from (seed, k).
McEstimate mc_expectation(std::uint64_t d_system, std::optional<std::uint64_t> d_env,
                          std::size_t sample_count, std::uint64_t seed);

void write_csv_header(std::ostream& out, std::size_t d_system, bool with_moduli);
void write_csv_row(std::ostream& out, const TimeSeriesRecord& record);

}  // namespace decoh
