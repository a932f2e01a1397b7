// Command-line front end: evolve, sweep, mc, track, predict.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "decoh/config.hpp"
#include "decoh/harness.hpp"
#include "decoh/observables.hpp"
#include "decoh/parallel.hpp"

namespace {

using namespace decoh;

struct RunOptions {
  std::string config_path;
  std::optional<std::string> output;
  std::optional<int> workers;
};

void add_run_options(CLI::App* cmd, RunOptions& opts) {
  cmd->add_option("config", opts.config_path, "Experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("-o,--output", opts.output, "CSV output path (overrides the config)");
  cmd->add_option("-w,--workers", opts.workers, "Worker threads (0 = OpenMP default)")
      ->check(CLI::NonNegativeNumber);
}

ExperimentConfig load(const RunOptions& opts) {
  ExperimentConfig c = load_config(opts.config_path);
  if (opts.output) c.output = *opts.output;
  if (opts.workers) c.workers = *opts.workers;
  return c;
}

void print_summary(const ExperimentConfig& c, const Trajectory& traj) {
  const TimeAverages avg =
      time_average(traj.records, {c.resolved_t_avg_start(), c.resolved_t_max()});
  const double pred = predicted_sigma(traj.model.system_dim(), traj.model.env_dim());
  std::printf("model          %s, %zu bonds, a = %.6g, K = %d\n", traj.model.label.c_str(),
              traj.model.bonds.size(), traj.plan.radius, traj.plan.term_count);
  std::printf("steps          %zu (t_max = %.6g)\n", traj.records.size() - 1, c.resolved_t_max());
  std::printf("sigma(t_max)   %.6e\n", traj.records.back().sigma);
  std::printf("sigma_bar      %.6e over %zu samples (predicted %.6e, ratio %.4f)\n", avg.sigma,
              avg.samples, pred, avg.sigma / pred);
  std::printf("delta_bar      %.6e uniform, %.6e fitted\n", avg.delta_uniform,
              avg.delta_fitted);
  std::printf("max norm err   %.3e\n", max_norm_error(traj.records));
  std::printf("max E drift    %.3e\n", max_relative_energy_drift(traj.records));
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos
                                                                          : comma - pos);
    if (item.empty()) throw CLI::ValidationError("--ne", "empty entry in list");
    std::size_t used = 0;
    const int v = std::stoi(item, &used);
    if (used != item.size() || v < 1)
      throw CLI::ValidationError("--ne", "entries must be positive integers");
    out.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decoherence and relaxation of a spin system coupled to a spin environment"};
  app.require_subcommand(1);

  RunOptions evolve_opts;
  auto* evolve = app.add_subcommand("evolve", "Run one trajectory and write its time series");
  add_run_options(evolve, evolve_opts);

  RunOptions sweep_opts;
  std::string ne_list;
  auto* sweep = app.add_subcommand("sweep", "Time-averaged sigma for a list of environment sizes");
  add_run_options(sweep, sweep_opts);
  sweep->add_option("--ne", ne_list, "Comma-separated environment sizes, e.g. 2,4,6")->required();

  int mc_ds = 16;
  std::optional<std::uint64_t> mc_de;
  std::size_t mc_samples = 1000;
  std::uint64_t mc_seed = 1;
  int mc_workers = 0;
  auto* mc = app.add_subcommand("mc", "Monte-Carlo check of the random-state expectations");
  mc->add_option("--ds", mc_ds, "System dimension")->check(CLI::Range(2, 1 << 20));
  mc->add_option("--de", mc_de, "Environment dimension (omit for an isolated system)")
      ->check(CLI::PositiveNumber);
  mc->add_option("--samples", mc_samples, "Number of random states")->check(CLI::Range(100, 1 << 30));
  mc->add_option("--seed", mc_seed, "Base seed");
  mc->add_option("-w,--workers", mc_workers, "Worker threads")->check(CLI::NonNegativeNumber);

  RunOptions track_opts;
  auto* track = app.add_subcommand("track", "Run with per-element |rho_ij| recorded");
  add_run_options(track, track_opts);

  std::uint64_t pr_ds = 16;
  std::vector<std::uint64_t> pr_de;
  std::string pr_ne;
  auto* predict = app.add_subcommand("predict", "Closed-form sigma and delta for random states");
  predict->add_option("--ds", pr_ds, "System dimension")->check(CLI::Range(2, 1 << 30));
  auto* de_opt = predict->add_option("--de", pr_de, "Environment dimension(s)")
                     ->check(CLI::PositiveNumber);
  auto* ne_opt = predict->add_option("--ne", pr_ne, "Environment spin counts, comma-separated");
  de_opt->excludes(ne_opt);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*evolve) {
      const ExperimentConfig c = load(evolve_opts);
      print_summary(c, run_evolution(c));
    } else if (*sweep) {
      const ExperimentConfig c = load(sweep_opts);
      const SweepResult r = scaling_sweep(c, parse_int_list(ne_list));
      std::printf("%5s %14s %14s %8s %14s %14s %10s %10s\n", "N_E", "sigma_bar", "predicted",
                  "ratio", "delta_bar", "pred_delta", "norm_err", "E_drift");
      for (const SweepRow& row : r.rows)
        std::printf("%5d %14.6e %14.6e %8.4f %14.6e %14.6e %10.2e %10.2e\n", row.n_env,
                    row.sigma_bar, row.predicted_sigma, row.ratio, row.delta_bar_uniform,
                    row.predicted_delta, row.max_norm_error, row.max_energy_drift);
      if (r.rows.size() >= 2)
        std::printf("slope of ln(sigma_bar) vs N_E: %.5f (ln2/2 = %.5f)\n", r.slope,
                    std::log(2.0) / 2.0);
    } else if (*mc) {
      set_worker_count(mc_workers);
      const McEstimate e = mc_expectation(static_cast<std::uint64_t>(mc_ds), mc_de, mc_samples,
                                          mc_seed);
      std::printf("samples        %zu\n", e.samples);
      std::printf("<2 sigma^2>    %.6e +- %.2e (closed form %.6e)\n", e.mean_two_sigma_sq,
                  e.se_two_sigma_sq, e.target_two_sigma_sq);
      if (mc_de)
        std::printf("<delta^2>      %.6e +- %.2e (closed form %.6e)\n", e.mean_delta_sq,
                    e.se_delta_sq, e.target_delta_sq);
    } else if (*track) {
      ExperimentConfig c = load(track_opts);
      const Trajectory traj = track_components(c);
      print_summary(c, traj);
      const TimeSeriesRecord& last = traj.records.back();
      const std::size_t d = traj.model.system_dim();
      std::printf("largest |rho_ij| (i<j) at t_max:\n");
      std::vector<OffDiagonalComponent> comps;
      std::size_t k = 0;
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j, ++k)
          if (i != j) comps.push_back({i, j, last.moduli[k]});
      std::stable_sort(comps.begin(), comps.end(),
                       [](const auto& a, const auto& b) { return a.modulus > b.modulus; });
      for (std::size_t n = 0; n < std::min<std::size_t>(8, comps.size()); ++n)
        std::printf("  (%zu,%zu) %.6e\n", comps[n].i, comps[n].j, comps[n].modulus);
    } else if (*predict) {
      std::vector<std::uint64_t> dims = pr_de;
      if (!pr_ne.empty())
        for (int n : parse_int_list(pr_ne)) {
          if (n > 62) throw std::invalid_argument("--ne entries must be <= 62");
          dims.push_back(std::uint64_t{1} << n);
        }
      if (dims.empty()) dims.push_back(1);
      std::printf("%12s %14s %14s\n", "D_E", "sigma", "delta");
      for (std::uint64_t de : dims)
        std::printf("%12llu %14.6e %14.6e\n", static_cast<unsigned long long>(de),
                    predicted_sigma(pr_ds, de), predicted_delta(pr_ds, de));
      std::printf("%12s %14.6e\n", "isolated", predicted_sigma_isolated(pr_ds));
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
