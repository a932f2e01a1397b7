#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "decoh/rng.hpp"

namespace decoh {

// Spin-1/2 coupling graphs for H = H_S + H_E + H_SE, where every bond
// (a, b) contributes -(Jx Sx_a Sx_b + Jy Sy_a Sy_b + Jz Sz_a Sz_b).
//
// Site layout: system spins are 0..n_system-1, environment spins follow.
// Ring order is index order, closed by the bond (0, N-1).

enum class CouplingCase { I, II };

enum class Sector { system, environment, system_environment };

struct Coupling {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  static Coupling isotropic(double j) { return {j, j, j}; }
  bool operator==(const Coupling&) const = default;
};

struct Bond {
  int site_a = 0;
  int site_b = 0;
  Coupling strength;

  bool operator==(const Bond&) const = default;
};

Sector sector_of(const Bond& bond, int n_system);

/// How strengths are assigned to new bonds: case I draws every axis
/// uniformly from [-omega_max, omega_max] (environment) or
/// [-delta_max, delta_max] (system-environment); case II uses (J, J, J).
/// System bonds are always isotropic with J = j_system.
struct CouplingRule {
  CouplingCase coupling_case = CouplingCase::I;
  double j_system = -0.15;
  double omega_max = 0.2;
  double delta_max = 0.2;

  bool operator==(const CouplingRule&) const = default;
};

struct ModelSpec {
  int n_system = 0;
  int n_env = 0;
  CouplingRule rule;
  std::vector<Bond> bonds;
  std::string label;

  int n_sites() const { return n_system + n_env; }
  std::uint64_t system_dim() const { return std::uint64_t{1} << n_system; }
  std::uint64_t env_dim() const { return std::uint64_t{1} << n_env; }
  std::uint64_t dim() const { return std::uint64_t{1} << n_sites(); }

  bool has_bond(int a, int b) const;

  bool operator==(const ModelSpec&) const = default;
};

/// Throws std::invalid_argument if a bond is out of range, a self-loop,
/// not ordered site_a < site_b, or duplicated.
void validate(const ModelSpec& spec);

ModelSpec build_ring(int n_system, int n_env, CouplingCase coupling_case,
                     double j_system, double omega_max, double delta_max,
                     Rng& couplings);

/// Adds `count` small-world bonds between non-neighboring environment
/// spins. Candidates are shuffled once by `rng` and taken in order, so the
/// bonds added for count m are a prefix of those added for any m' > m.
ModelSpec add_env_swbs(ModelSpec spec, int count, Rng& rng);

/// Adds `count` system-environment small-world bonds such that no
/// environment spin carries more than `k_max` of them. Same prefix
/// property as add_env_swbs.
ModelSpec add_se_swbs(ModelSpec spec, int count, int k_max, Rng& rng);

/// Completes the environment graph. `rng` only supplies case I strengths.
ModelSpec add_all_to_all_env(ModelSpec spec, Rng& rng);

/// Overwrites the strengths of `count` environment bonds with per-axis
/// draws from [-omega_max, omega_max]. Only valid for case II models.
ModelSpec replace_random_env_bonds(ModelSpec spec, int count, double omega_max,
                                   Rng& rng);

/// Upper bound on ||H||_2 from the triangle inequality over bond terms.
double spectral_bound(const ModelSpec& spec);

/// Realized K: the largest number of system spins tied to one environment
/// spin through small-world bonds (the ring bonds are not counted).
int realized_k(const ModelSpec& spec);

// Text form, versioned; strengths carry 17 significant digits so a parsed
// model is bit-identical to the one written.
std::string serialize(const ModelSpec& spec);
ModelSpec parse_model_spec(std::string_view text);

const char* to_string(CouplingCase c);
CouplingCase parse_coupling_case(std::string_view text);

}  // namespace decoh
