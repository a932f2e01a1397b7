#include "decoh/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <tuple>
#include <utility>

#include <json.hpp>

#include "decoh/parallel.hpp"

namespace decoh {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void put(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

// Computes the per-step observables; owns the scratch vector for H|psi>.
class Recorder {
 public:
  Recorder(const ModelSpec& model, const SpinOperator& op, bool with_moduli)
      : n_system_(model.n_system),
        op_(op),
        basis_(hermitian_eigendecomposition(system_hamiltonian(model))),
        h_psi_(op.dim()),
        with_moduli_(with_moduli) {}

  TimeSeriesRecord observe(const StateVector& psi, double t) {
    TimeSeriesRecord r;
    r.t = t;
    const ReducedDensityMatrix rho = to_energy_basis(reduce(psi, n_system_), basis_);
    r.sigma = sigma(rho);
    r.delta_uniform =
        delta_and_b(rho.entries, basis_.energies, basis_.degeneracy_tol, ReferenceProfile::uniform)
            .delta;
    try {
      const DiagonalFit fit = delta_and_b(rho.entries, basis_.energies, basis_.degeneracy_tol,
                                          ReferenceProfile::fitted);
      r.delta_fitted = fit.delta;
      r.b_fitted = fit.b;
    } catch (const std::domain_error&) {
      r.delta_fitted = kNaN;
      r.b_fitted = kNaN;
    }
    const PurityReport p = purity_report(rho.entries);
    r.purity = p.purity;
    r.trace_diag_sq = p.trace_diag_sq;
    op_.apply(psi.amplitudes(), h_psi_);
    r.energy = inner_product(psi.amplitudes(), h_psi_).real();
    r.norm_error = std::abs(psi.norm() - 1.0);
    if (with_moduli_)
      for (std::size_t i = 0; i < rho.dim(); ++i)
        for (std::size_t j = i; j < rho.dim(); ++j) r.moduli.push_back(std::abs(rho(i, j)));
    return r;
  }

  std::size_t system_dim() const { return basis_.energies.size(); }

 private:
  int n_system_;
  const SpinOperator& op_;
  SystemEigenbasis basis_;
  std::vector<Amplitude> h_psi_;
  bool with_moduli_;
};

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file '" + path.string() + "'");
  return out;
}

std::filesystem::path sibling(const std::string& output, const std::string& suffix) {
  const std::filesystem::path p(output);
  return p.parent_path() / (p.stem().string() + suffix);
}

}  // namespace

ModelSpec build_model(const ExperimentConfig& c) {
  c.validate();
  Rng couplings(c.seeds.couplings);
  ModelSpec spec =
      build_ring(c.n_system, c.n_env, c.coupling_case, c.j_system, c.omega_max, c.delta_max,
                 couplings);
  Rng swb_env(c.seeds.swb_env);
  spec = add_env_swbs(std::move(spec), c.swb_env_count, swb_env);
  Rng swb_se(c.seeds.swb_se);
  spec = add_se_swbs(std::move(spec), c.swb_se_count, c.k_max, swb_se);
  if (c.all_to_all_env) spec = add_all_to_all_env(std::move(spec), swb_env);
  if (c.random_bond_count > 0) {
    Rng random_bonds(c.seeds.random_bonds);
    spec = replace_random_env_bonds(std::move(spec), c.random_bond_count, c.omega_max,
                                    random_bonds);
  }
  return spec;
}

StateVector initial_state(const ExperimentConfig& c) {
  Rng rng(c.seeds.state);
  if (c.initial_state == InitialState::UDUDY) return udud_y(c.n_env, rng);
  return random_hypersphere_state(c.n_system + c.n_env, rng);
}

void write_csv_header(std::ostream& out, std::size_t d_system, bool with_moduli) {
  out << "t,sigma,delta_fitted,delta_uniform,b_fitted,purity,trace_diag_sq,energy,norm_error";
  if (with_moduli)
    for (std::size_t i = 0; i < d_system; ++i)
      for (std::size_t j = i; j < d_system; ++j) out << ",rho_" << i << '_' << j;
  out << '\n';
}

void write_csv_row(std::ostream& out, const TimeSeriesRecord& r) {
  const double fields[] = {r.t,      r.sigma,         r.delta_fitted, r.delta_uniform, r.b_fitted,
                           r.purity, r.trace_diag_sq, r.energy,       r.norm_error};
  bool first = true;
  for (double v : fields) {
    if (!first) out << ',';
    first = false;
    put(out, v);
  }
  for (double m : r.moduli) {
    out << ',';
    put(out, m);
  }
  out << '\n';
}

Trajectory run_evolution(const ExperimentConfig& config) {
  config.validate();
  set_worker_count(config.workers);

  Trajectory traj;
  traj.model = build_model(config);
  StateVector psi = initial_state(config);
  traj.plan = make_plan(traj.model, config.tau, config.epsilon);
  ChebyshevStepper stepper(traj.model, traj.plan);
  Recorder recorder(traj.model, stepper.op(), config.track_components);

  const double t_max = config.resolved_t_max();
  const auto n_steps = std::max<long long>(1, std::llround(t_max / config.tau));

  std::ofstream csv;
  if (!config.output.empty()) {
    const std::filesystem::path csv_path(config.output);
    const std::filesystem::path model_path = csv_path.string() + ".model";
    {
      std::ofstream model_out = open_output(model_path);
      model_out << serialize(traj.model);
    }
    {
      std::ofstream manifest = open_output(csv_path.string() + ".manifest.json");
      const nlohmann::json doc = {{"config", nlohmann::json::parse(to_json(config))},
                                  {"model_file", model_path.string()},
                                  {"radius", traj.plan.radius},
                                  {"term_count", traj.plan.term_count},
                                  {"steps", n_steps}};
      manifest << doc.dump(2) << '\n';
    }
    csv = open_output(csv_path);
    write_csv_header(csv, recorder.system_dim(), config.track_components);
  }

  traj.records.reserve(static_cast<std::size_t>(n_steps) + 1);
  for (long long k = 0; k <= n_steps; ++k) {
    if (k > 0) stepper.step(psi);
    TimeSeriesRecord r = recorder.observe(psi, static_cast<double>(k) * config.tau);
    if (csv.is_open()) {
      write_csv_row(csv, r);
      csv.flush();
    }
    if (!(r.norm_error < kMaxNormError))
      throw std::runtime_error("run aborted: norm error " + std::to_string(r.norm_error) +
                               " at t = " + std::to_string(r.t));
    traj.records.push_back(std::move(r));
  }
  return traj;
}

Trajectory track_components(ExperimentConfig config) {
  config.track_components = true;
  return run_evolution(config);
}

TimeAverages time_average(const std::vector<TimeSeriesRecord>& records, TimeWindow window) {
  TimeAverages avg;
  double fitted_delta = 0.0, fitted_b = 0.0;
  std::size_t fitted = 0;
  for (const TimeSeriesRecord& r : records) {
    if (r.t < window.start || r.t > window.end) continue;
    avg.sigma += r.sigma;
    avg.delta_uniform += r.delta_uniform;
    ++avg.samples;
    if (std::isfinite(r.delta_fitted)) {
      fitted_delta += r.delta_fitted;
      fitted_b += r.b_fitted;
      ++fitted;
    }
  }
  if (avg.samples == 0) throw std::invalid_argument("time_average: empty window");
  if (avg.samples < kMinAverageSamples)
    throw std::invalid_argument("time_average: window holds " + std::to_string(avg.samples) +
                                " records, need at least " + std::to_string(kMinAverageSamples));
  const auto n = static_cast<double>(avg.samples);
  avg.sigma /= n;
  avg.delta_uniform /= n;
  avg.delta_fitted = fitted ? fitted_delta / static_cast<double>(fitted) : kNaN;
  avg.b_fitted = fitted ? fitted_b / static_cast<double>(fitted) : kNaN;
  return avg;
}

double max_relative_energy_drift(const std::vector<TimeSeriesRecord>& records) {
  if (records.empty()) return 0.0;
  const double e0 = records.front().energy;
  const double scale = e0 != 0.0 ? std::abs(e0) : 1.0;
  double worst = 0.0;
  for (const TimeSeriesRecord& r : records) worst = std::max(worst, std::abs(r.energy - e0) / scale);
  return worst;
}

double max_norm_error(const std::vector<TimeSeriesRecord>& records) {
  double worst = 0.0;
  for (const TimeSeriesRecord& r : records) worst = std::max(worst, r.norm_error);
  return worst;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_slope: need at least two matching points");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_slope: x values are all equal");
  return sxy / sxx;
}

SweepResult scaling_sweep(const ExperimentConfig& config_template,
                          const std::vector<int>& n_env_list) {
  SweepResult result;
  std::vector<double> xs, ys;
  for (int n_env : n_env_list) {
    ExperimentConfig c = config_template;
    c.n_env = n_env;
    if (!config_template.output.empty())
      c.output = sibling(config_template.output, "_ne" + std::to_string(n_env) + ".csv").string();
    const Trajectory traj = run_evolution(c);
    const TimeAverages avg =
        time_average(traj.records, {c.resolved_t_avg_start(), c.resolved_t_max()});

    SweepRow row;
    row.n_env = n_env;
    row.sigma_bar = avg.sigma;
    row.predicted_sigma = predicted_sigma(traj.model.system_dim(), traj.model.env_dim());
    row.ratio = row.sigma_bar / row.predicted_sigma;
    row.delta_bar_uniform = avg.delta_uniform;
    row.predicted_delta = predicted_delta(traj.model.system_dim(), traj.model.env_dim());
    row.max_norm_error = max_norm_error(traj.records);
    row.max_energy_drift = max_relative_energy_drift(traj.records);
    result.rows.push_back(row);
    xs.push_back(n_env);
    ys.push_back(std::log(row.sigma_bar));
  }
  if (xs.size() >= 2) result.slope = fit_slope(xs, ys);

  if (!config_template.output.empty()) {
    std::ofstream out = open_output(sibling(config_template.output, "_sweep.csv"));
    out << "n_env,sigma_bar,predicted_sigma,ratio,delta_bar_uniform,predicted_delta\n";
    for (const SweepRow& r : result.rows) {
      out << r.n_env;
      for (double v : {r.sigma_bar, r.predicted_sigma, r.ratio, r.delta_bar_uniform,
                       r.predicted_delta}) {
        out << ',';
        put(out, v);
      }
      out << '\n';
    }
    out << "# slope_ln_sigma_vs_n_env,";
    put(out, result.slope);
    out << '\n';
  }
  return result;
}

McEstimate mc_expectation(std::uint64_t d_system, std::optional<std::uint64_t> d_env,
                          std::size_t sample_count, std::uint64_t seed) {
  if (d_system < 2) throw std::invalid_argument("mc_expectation: D_S must be >= 2");
  if (d_env && *d_env < 1) throw std::invalid_argument("mc_expectation: D_E must be >= 1");
  if (sample_count < 100) throw std::invalid_argument("mc_expectation: need >= 100 samples");
  const std::uint64_t dim = d_system * d_env.value_or(1);
  if (dim > kMaxMcDim) throw std::length_error("mc_expectation: dimension exceeds guard");

  std::vector<double> two_sigma_sq(sample_count), delta_sq(sample_count);
  const std::uint64_t base = splitmix64(seed);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(sample_count); ++k) {
    Rng rng(splitmix64(base + static_cast<std::uint64_t>(k)));
    const std::vector<Amplitude> psi = random_unit_amplitudes(dim, rng);
    const ComplexMatrix rho = partial_trace(psi, d_system);
    const double s = sigma(rho);
    two_sigma_sq[static_cast<std::size_t>(k)] = 2.0 * s * s;
    double d2 = 0.0;
    for (std::size_t i = 0; i < d_system; ++i) {
      const double dev = rho(i, i).real() - 1.0 / static_cast<double>(d_system);
      d2 += dev * dev;
    }
    delta_sq[static_cast<std::size_t>(k)] = d2;
  }

  auto mean_se = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - m) * (x - m);
    var /= static_cast<double>(v.size() - 1);
    return std::pair{m, std::sqrt(var / static_cast<double>(v.size()))};
  };

  McEstimate est;
  est.samples = sample_count;
  std::tie(est.mean_two_sigma_sq, est.se_two_sigma_sq) = mean_se(two_sigma_sq);
  const double ds = static_cast<double>(d_system);
  if (d_env) {
    const double de = static_cast<double>(*d_env);
    est.target_two_sigma_sq = (ds - 1.0) / (ds * de + 1.0);
    std::tie(est.mean_delta_sq, est.se_delta_sq) = mean_se(delta_sq);
    est.target_delta_sq = (ds - 1.0) / (ds * (ds * de + 1.0));
  } else {
    est.target_two_sigma_sq = (ds - 1.0) / (ds + 1.0);
    est.mean_delta_sq = est.se_delta_sq = est.target_delta_sq = kNaN;
  }
  return est;
}

}  // namespace decoh
