#include "decoh/spin_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace decoh {

namespace {

constexpr int kFormatVersion = 1;

Coupling random_coupling(double max_abs, Rng& rng) {
  Coupling c;
  c.x = rng.uniform(-max_abs, max_abs);
  c.y = rng.uniform(-max_abs, max_abs);
  c.z = rng.uniform(-max_abs, max_abs);
  return c;
}

// Strength of a new bond outside the system, per the model's case.
Coupling rule_coupling(const CouplingRule& rule, Sector sector, Rng& rng) {
  if (sector == Sector::system) return Coupling::isotropic(rule.j_system);
  if (rule.coupling_case == CouplingCase::II)
    return Coupling::isotropic(rule.j_system);
  return random_coupling(
      sector == Sector::environment ? rule.omega_max : rule.delta_max, rng);
}

Bond make_bond(int a, int b, Coupling strength) {
  if (a > b) std::swap(a, b);
  return Bond{a, b, strength};
}

bool is_ring_se_bond(const ModelSpec& spec, const Bond& bond) {
  const int last = spec.n_sites() - 1;
  return (bond.site_a == spec.n_system - 1 && bond.site_b == spec.n_system) ||
         (bond.site_a == 0 && bond.site_b == last);
}

void append_label(ModelSpec& spec, const std::string& text) {
  if (!spec.label.empty()) spec.label += ' ';
  spec.label += text;
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Sector sector_of(const Bond& bond, int n_system) {
  const bool a_sys = bond.site_a < n_system;
  const bool b_sys = bond.site_b < n_system;
  if (a_sys && b_sys) return Sector::system;
  if (!a_sys && !b_sys) return Sector::environment;
  return Sector::system_environment;
}

bool ModelSpec::has_bond(int a, int b) const {
  if (a > b) std::swap(a, b);
  return std::any_of(bonds.begin(), bonds.end(), [&](const Bond& bond) {
    return bond.site_a == a && bond.site_b == b;
  });
}

void validate(const ModelSpec& spec) {
  if (spec.n_system < 1 || spec.n_env < 1)
    throw std::invalid_argument("model needs at least one system and one environment spin");
  const int n = spec.n_sites();
  std::set<std::pair<int, int>> seen;
  for (const Bond& bond : spec.bonds) {
    if (bond.site_a < 0 || bond.site_b >= n)
      throw std::invalid_argument("bond site out of range");
    if (bond.site_a >= bond.site_b)
      throw std::invalid_argument("bond sites must satisfy site_a < site_b");
    if (!seen.emplace(bond.site_a, bond.site_b).second)
      throw std::invalid_argument("duplicate bond (" + std::to_string(bond.site_a) +
                                  ", " + std::to_string(bond.site_b) + ")");
  }
}

ModelSpec build_ring(int n_system, int n_env, CouplingCase coupling_case,
                     double j_system, double omega_max, double delta_max,
                     Rng& couplings) {
  if (n_system < 1 || n_env < 1)
    throw std::invalid_argument("build_ring: site counts must be positive");
  if (coupling_case != CouplingCase::I && coupling_case != CouplingCase::II)
    throw std::invalid_argument("build_ring: invalid coupling case");

  ModelSpec spec;
  spec.n_system = n_system;
  spec.n_env = n_env;
  spec.rule = CouplingRule{coupling_case, j_system, omega_max, delta_max};

  const int n = n_system + n_env;
  auto emit = [&](int a, int b) {
    if (spec.has_bond(a, b)) return;  // the 2-site ring closes onto (0, 1)
    Bond bond = make_bond(a, b, {});
    bond.strength = rule_coupling(spec.rule, sector_of(bond, n_system), couplings);
    spec.bonds.push_back(bond);
  };
  for (int s = 0; s + 1 < n; ++s) emit(s, s + 1);
  emit(0, n - 1);

  spec.label = std::string("ring case=") + to_string(coupling_case) +
               " couplings_seed=" + std::to_string(couplings.seed());
  return spec;
}

ModelSpec add_env_swbs(ModelSpec spec, int count, Rng& rng) {
  if (count < 0) throw std::invalid_argument("add_env_swbs: negative count");
  if (count == 0) return spec;

  std::vector<std::pair<int, int>> candidates;
  for (int a = spec.n_system; a < spec.n_sites(); ++a)
    for (int b = a + 1; b < spec.n_sites(); ++b)
      if (!spec.has_bond(a, b)) candidates.emplace_back(a, b);
  if (static_cast<std::size_t>(count) > candidates.size())
    throw std::invalid_argument("add_env_swbs: count " + std::to_string(count) +
                                " exceeds " + std::to_string(candidates.size()) +
                                " candidate pairs");
  shuffle(candidates, rng);

  for (int k = 0; k < count; ++k) {
    const auto [a, b] = candidates[static_cast<std::size_t>(k)];
    spec.bonds.push_back(make_bond(a, b, rule_coupling(spec.rule, Sector::environment, rng)));
  }
  validate(spec);
  append_label(spec, "env_swbs=" + std::to_string(count) +
                         " swb_env_seed=" + std::to_string(rng.seed()));
  return spec;
}

ModelSpec add_se_swbs(ModelSpec spec, int count, int k_max, Rng& rng) {
  if (k_max < 1) throw std::invalid_argument("add_se_swbs: k_max must be >= 1");
  if (count < 0) throw std::invalid_argument("add_se_swbs: negative count");
  if (count == 0) return spec;

  std::map<int, int> load;  // environment spin -> system SWBs already attached
  for (const Bond& bond : spec.bonds)
    if (sector_of(bond, spec.n_system) == Sector::system_environment &&
        !is_ring_se_bond(spec, bond))
      ++load[bond.site_b];

  std::vector<std::pair<int, int>> candidates;
  for (int s = 0; s < spec.n_system; ++s)
    for (int e = spec.n_system; e < spec.n_sites(); ++e)
      if (!spec.has_bond(s, e)) candidates.emplace_back(s, e);
  shuffle(candidates, rng);

  int added = 0;
  for (const auto& [s, e] : candidates) {
    if (added == count) break;
    if (load[e] >= k_max) continue;
    ++load[e];
    spec.bonds.push_back(
        make_bond(s, e, rule_coupling(spec.rule, Sector::system_environment, rng)));
    ++added;
  }
  if (added < count)
    throw std::invalid_argument("add_se_swbs: only " + std::to_string(added) +
                                " bonds feasible with K <= " + std::to_string(k_max));
  validate(spec);
  append_label(spec, "se_swbs=" + std::to_string(count) + " k_max=" +
                         std::to_string(k_max) + " K=" + std::to_string(realized_k(spec)) +
                         " swb_se_seed=" + std::to_string(rng.seed()));
  return spec;
}

ModelSpec add_all_to_all_env(ModelSpec spec, Rng& rng) {
  int added = 0;
  for (int a = spec.n_system; a < spec.n_sites(); ++a)
    for (int b = a + 1; b < spec.n_sites(); ++b)
      if (!spec.has_bond(a, b)) {
        spec.bonds.push_back(make_bond(a, b, rule_coupling(spec.rule, Sector::environment, rng)));
        ++added;
      }
  if (added > 0) append_label(spec, "all_to_all_env=" + std::to_string(added));
  return spec;
}

ModelSpec replace_random_env_bonds(ModelSpec spec, int count, double omega_max,
                                   Rng& rng) {
  if (spec.rule.coupling_case != CouplingCase::II)
    throw std::invalid_argument("replace_random_env_bonds: model must be case II");
  std::vector<std::size_t> env_bonds;
  for (std::size_t i = 0; i < spec.bonds.size(); ++i)
    if (sector_of(spec.bonds[i], spec.n_system) == Sector::environment)
      env_bonds.push_back(i);
  if (count < 0 || static_cast<std::size_t>(count) > env_bonds.size())
    throw std::invalid_argument("replace_random_env_bonds: count " + std::to_string(count) +
                                " outside [0, " + std::to_string(env_bonds.size()) + "]");
  if (count == 0) return spec;

  shuffle(env_bonds, rng);
  for (int k = 0; k < count; ++k)
    spec.bonds[env_bonds[static_cast<std::size_t>(k)]].strength =
        random_coupling(omega_max, rng);
  append_label(spec, "random_bonds=" + std::to_string(count) +
                         " random_bonds_seed=" + std::to_string(rng.seed()));
  return spec;
}

double spectral_bound(const ModelSpec& spec) {
  double bound = 0.0;
  for (const Bond& bond : spec.bonds)
    bound += (std::abs(bond.strength.x) + std::abs(bond.strength.y) +
              std::abs(bond.strength.z)) / 4.0;
  return bound > 0.0 ? bound : 1e-12;
}

int realized_k(const ModelSpec& spec) {
  std::map<int, int> load;
  int k = 0;
  for (const Bond& bond : spec.bonds)
    if (sector_of(bond, spec.n_system) == Sector::system_environment &&
        !is_ring_se_bond(spec, bond))
      k = std::max(k, ++load[bond.site_b]);
  return k;
}

const char* to_string(CouplingCase c) { return c == CouplingCase::I ? "I" : "II"; }

CouplingCase parse_coupling_case(std::string_view text) {
  if (text == "I" || text == "1") return CouplingCase::I;
  if (text == "II" || text == "2") return CouplingCase::II;
  throw std::invalid_argument("unknown coupling case '" + std::string(text) + "'");
}

std::string serialize(const ModelSpec& spec) {
  std::ostringstream out;
  out << "decoh-model " << kFormatVersion << '\n'
      << "n_system " << spec.n_system << '\n'
      << "n_env " << spec.n_env << '\n'
      << "case " << to_string(spec.rule.coupling_case) << '\n'
      << "j_system " << format_real(spec.rule.j_system) << '\n'
      << "omega_max " << format_real(spec.rule.omega_max) << '\n'
      << "delta_max " << format_real(spec.rule.delta_max) << '\n';
  std::string label = spec.label;
  std::replace(label.begin(), label.end(), '\n', ' ');
  out << "label " << label << '\n';
  out << "bonds " << spec.bonds.size() << '\n';
  for (const Bond& b : spec.bonds)
    out << b.site_a << ' ' << b.site_b << ' ' << format_real(b.strength.x) << ' '
        << format_real(b.strength.y) << ' ' << format_real(b.strength.z) << '\n';
  out << "end\n";
  return out.str();
}

ModelSpec parse_model_spec(std::string_view text) {
  std::istringstream in{std::string(text)};
  auto expect_key = [&](const char* key) {
    std::string word;
    if (!(in >> word) || word != key)
      throw std::invalid_argument(std::string("model file: expected '") + key + "'");
  };

  expect_key("decoh-model");
  int version = 0;
  in >> version;
  if (version != kFormatVersion)
    throw std::invalid_argument("model file: unsupported version " + std::to_string(version));

  ModelSpec spec;
  std::string word;
  expect_key("n_system");
  in >> spec.n_system;
  expect_key("n_env");
  in >> spec.n_env;
  expect_key("case");
  in >> word;
  spec.rule.coupling_case = parse_coupling_case(word);
  expect_key("j_system");
  in >> spec.rule.j_system;
  expect_key("omega_max");
  in >> spec.rule.omega_max;
  expect_key("delta_max");
  in >> spec.rule.delta_max;
  expect_key("label");
  in.get();
  std::getline(in, spec.label);
  expect_key("bonds");
  std::size_t count = 0;
  in >> count;
  spec.bonds.resize(count);
  for (Bond& b : spec.bonds)
    in >> b.site_a >> b.site_b >> b.strength.x >> b.strength.y >> b.strength.z;
  if (!in) throw std::invalid_argument("model file: truncated bond list");
  expect_key("end");
  validate(spec);
  return spec;
}

}  // namespace decoh
