#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "decoh/harness.hpp"
#include "decoh/parallel.hpp"

using namespace decoh;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path scratch_dir(const char* name) {
  const auto dir = std::filesystem::temp_directory_path() / "decoh_unit" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.n_env = 4;
  c.t_max = 30.0;
  c.tau = 1.0;
  return c;
}

}  // namespace

TEST_CASE("model construction applies every mutation") {
  ExperimentConfig c;
  c.n_env = 8;
  c.swb_env_count = 2;
  c.swb_se_count = 2;
  const ModelSpec plain = build_model(small_config());
  CHECK(plain.bonds.size() == 8);
  const ModelSpec spec = build_model(c);
  CHECK(spec.bonds.size() == 12 + 2 + 2);
  CHECK(realized_k(spec) <= 1);
  c.all_to_all_env = true;
  // 8 env spins: 28 pairs, 7 ring bonds and 2 SWBs already present.
  CHECK(build_model(c).bonds.size() == 12 + 2 + 2 + 19);
}

TEST_CASE("random bond counts nest through the config") {
  ExperimentConfig c;
  c.n_env = 14;
  c.coupling_case = CouplingCase::II;
  c.random_bond_count = 1;
  const ModelSpec one = build_model(c);
  c.random_bond_count = 4;
  const ModelSpec four = build_model(c);
  int shared = 0;
  for (std::size_t i = 0; i < one.bonds.size(); ++i)
    if (!(one.bonds[i].strength == Coupling::isotropic(-0.15))) {
      CHECK(four.bonds[i] == one.bonds[i]);
      ++shared;
    }
  CHECK(shared == 1);
}

TEST_CASE("initial states follow the config") {
  ExperimentConfig c = small_config();
  const StateVector x = initial_state(c);
  CHECK(x.n_qubits() == 8);
  CHECK(x == initial_state(c));
  c.initial_state = InitialState::UDUDY;
  const StateVector y = initial_state(c);
  CHECK(sigma(reduce(y, 4)) < 1e-15);
}

TEST_CASE("first record matches a direct reduction of the initial state") {
  ExperimentConfig c = small_config();
  c.coupling_case = CouplingCase::II;
  const Trajectory traj = run_evolution(c);
  CHECK(traj.records.size() == 31);
  const SystemEigenbasis basis = hermitian_eigendecomposition(system_hamiltonian(traj.model));
  const ReducedDensityMatrix rho = to_energy_basis(reduce(initial_state(c), 4), basis);
  CHECK(traj.records[0].sigma == doctest::Approx(sigma(rho)).epsilon(1e-14));
  CHECK(traj.records[0].t == 0.0);
  CHECK(traj.records[30].t == doctest::Approx(30.0));
  for (const TimeSeriesRecord& r : traj.records) {
    CHECK(r.norm_error < 1e-12);
    CHECK(std::abs(r.purity - r.trace_diag_sq - 2 * r.sigma * r.sigma) < 1e-12);
  }
  CHECK(max_relative_energy_drift(traj.records) < 1e-10);
}

TEST_CASE("zero Hamiltonian keeps every record equal to the first") {
  ExperimentConfig c = small_config();
  c.coupling_case = CouplingCase::II;
  c.j_system = 0.0;
  const Trajectory traj = run_evolution(c);
  for (const TimeSeriesRecord& r : traj.records) {
    CHECK(r.sigma == traj.records[0].sigma);
    CHECK(r.delta_uniform == traj.records[0].delta_uniform);
    CHECK(r.energy == 0.0);
  }
}

TEST_CASE("output files: CSV, model and manifest") {
  const auto dir = scratch_dir("evolve");
  ExperimentConfig c = small_config();
  c.output = (dir / "run.csv").string();
  const Trajectory traj = run_evolution(c);

  std::ifstream csv(dir / "run.csv");
  std::string header, first;
  std::getline(csv, header);
  std::getline(csv, first);
  CHECK(header == "t,sigma,delta_fitted,delta_uniform,b_fitted,purity,trace_diag_sq,energy,norm_error");
  std::ostringstream expect;
  write_csv_row(expect, traj.records[0]);
  CHECK(first + "\n" == expect.str());
  int lines = 2;
  for (std::string line; std::getline(csv, line);) ++lines;
  CHECK(lines == 32);

  CHECK(parse_model_spec(slurp(dir / "run.csv.model")) == traj.model);
  const std::string manifest = slurp(dir / "run.csv.manifest.json");
  CHECK(manifest.find("run.csv.model") != std::string::npos);
  CHECK(manifest.find("\"n_env\": 4") != std::string::npos);
}

TEST_CASE("CSV values carry 17 significant digits") {
  TimeSeriesRecord r;
  r.t = 0.1;
  r.sigma = 1.0 / 3.0;
  std::ostringstream out;
  write_csv_row(out, r);
  CHECK(out.str().rfind("0.10000000000000001,0.33333333333333331,", 0) == 0);
}

TEST_CASE("component tracking records every modulus") {
  ExperimentConfig c = small_config();
  c.t_max = 10.0;
  const Trajectory traj = track_components(c);
  for (const TimeSeriesRecord& r : traj.records) {
    REQUIRE(r.moduli.size() == 136);
    double diag = 0.0, off2 = 0.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < 16; ++i)
      for (std::size_t j = i; j < 16; ++j, ++k) {
        if (i == j) diag += r.moduli[k];
        else off2 += r.moduli[k] * r.moduli[k];
      }
    CHECK(diag == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(off2 == doctest::Approx(r.sigma * r.sigma).epsilon(1e-12));
  }
  std::ostringstream header;
  write_csv_header(header, 16, true);
  CHECK(header.str().find(",rho_0_0,rho_0_1,") != std::string::npos);
  CHECK(header.str().find(",rho_15_15\n") != std::string::npos);
}

TEST_CASE("time averages") {
  std::vector<TimeSeriesRecord> recs(21);
  for (int k = 0; k <= 20; ++k) {
    recs[static_cast<std::size_t>(k)].t = k;
    recs[static_cast<std::size_t>(k)].sigma = 0.25;
    recs[static_cast<std::size_t>(k)].delta_uniform = k % 4 == 0 ? 0.0 : (k % 4 == 2 ? 2.0 : 1.0);
    recs[static_cast<std::size_t>(k)].delta_fitted = std::nan("");
  }
  // Whole periods of the sawtooth 0,1,2,1 average to its midpoint.
  const TimeAverages a = time_average(recs, {0.0, 19.0});
  CHECK(a.sigma == 0.25);
  CHECK(a.samples == 20);
  CHECK(a.delta_uniform == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::isnan(a.delta_fitted));
  CHECK(time_average(recs, {10.0, 20.0}).samples == 11);
  CHECK_THROWS_AS(time_average(recs, {15.0, 20.0}), std::invalid_argument);
  CHECK_THROWS_AS(time_average(recs, {30.0, 40.0}), std::invalid_argument);
}

TEST_CASE("slope fit") {
  CHECK(fit_slope({1, 2, 3, 4}, {3, 5, 7, 9}) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(fit_slope({1}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(fit_slope({2, 2}, {1, 3}), std::invalid_argument);
}

TEST_CASE("energy drift and norm error helpers") {
  std::vector<TimeSeriesRecord> recs(3);
  recs[0].energy = -2.0;
  recs[1].energy = -2.0 + 2e-12;
  recs[2].energy = -2.0 - 1e-12;
  recs[1].norm_error = 3e-15;
  CHECK(max_relative_energy_drift(recs) == doctest::Approx(1e-12).epsilon(1e-3));
  CHECK(max_norm_error(recs) == 3e-15);
}

TEST_CASE("Monte-Carlo estimates agree with the closed forms") {
  const McEstimate a = mc_expectation(2, 2, 10000, 1);
  CHECK(a.target_two_sigma_sq == doctest::Approx(0.2));
  CHECK(std::abs(a.mean_two_sigma_sq - a.target_two_sigma_sq) < 3 * a.se_two_sigma_sq);
  const McEstimate b = mc_expectation(4, std::nullopt, 10000, 2);
  CHECK(b.target_two_sigma_sq == doctest::Approx(0.6));
  CHECK(std::abs(b.mean_two_sigma_sq - b.target_two_sigma_sq) < 3 * b.se_two_sigma_sq);
  CHECK(std::isnan(b.mean_delta_sq));
  const McEstimate c = mc_expectation(16, 64, 10000, 3);
  CHECK(c.target_delta_sq == doctest::Approx((15.0 / 16) / 1025));
  CHECK(std::abs(c.mean_delta_sq - c.target_delta_sq) < 3 * c.se_delta_sq);
}

TEST_CASE("Monte-Carlo: 10-qubit states, D_S = 4 split") {
  const McEstimate e = mc_expectation(4, 256, 1000, 17);
  CHECK(e.target_two_sigma_sq == doctest::Approx(3.0 / 1025).epsilon(1e-12));
  CHECK(std::abs(e.mean_two_sigma_sq - e.target_two_sigma_sq) < 3 * e.se_two_sigma_sq);
}

TEST_CASE("Monte-Carlo results do not depend on worker count") {
  set_worker_count(1);
  const McEstimate a = mc_expectation(4, 8, 500, 9);
  set_worker_count(3);
  const McEstimate b = mc_expectation(4, 8, 500, 9);
  set_worker_count(1);
  CHECK(a.mean_two_sigma_sq == b.mean_two_sigma_sq);
  CHECK(a.mean_delta_sq == b.mean_delta_sq);
  CHECK_THROWS_AS(mc_expectation(1, 4, 500, 1), std::invalid_argument);
  CHECK_THROWS_AS(mc_expectation(4, 4, 50, 1), std::invalid_argument);
}

TEST_CASE("sweep writes one CSV per point plus a table") {
  const auto dir = scratch_dir("sweep");
  ExperimentConfig c = small_config();
  c.output = (dir / "s.csv").string();
  const SweepResult r = scaling_sweep(c, {2, 3});
  REQUIRE(r.rows.size() == 2);
  CHECK(std::filesystem::exists(dir / "s_ne2.csv"));
  CHECK(std::filesystem::exists(dir / "s_ne3.csv"));
  const std::string table = slurp(dir / "s_sweep.csv");
  CHECK(table.rfind("n_env,sigma_bar,", 0) == 0);
  CHECK(r.rows[0].predicted_sigma == doctest::Approx(predicted_sigma(16, 4)));
  CHECK(r.rows[1].ratio == doctest::Approx(r.rows[1].sigma_bar / r.rows[1].predicted_sigma));
}
