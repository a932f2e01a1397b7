#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <map>
#include <set>

#include "decoh/observables.hpp"
#include "decoh/propagator.hpp"
#include "decoh/spin_model.hpp"

using namespace decoh;

namespace {

ModelSpec ring(int ns, int ne, CouplingCase c, std::uint64_t seed = 1) {
  Rng rng(seed);
  return build_ring(ns, ne, c, -0.15, 0.2, 0.2, rng);
}

bool contains_all(const ModelSpec& big, const ModelSpec& small) {
  return std::all_of(small.bonds.begin(), small.bonds.end(), [&](const Bond& b) {
    return std::find(big.bonds.begin(), big.bonds.end(), b) != big.bonds.end();
  });
}

int count_sector(const ModelSpec& spec, Sector s) {
  return static_cast<int>(std::count_if(spec.bonds.begin(), spec.bonds.end(), [&](const Bond& b) {
    return sector_of(b, spec.n_system) == s;
  }));
}

}  // namespace

TEST_CASE("case II ring: every bond isotropic at J") {
  const ModelSpec spec = ring(4, 18, CouplingCase::II);
  CHECK(spec.bonds.size() == 22);
  for (const Bond& b : spec.bonds) CHECK(b.strength == Coupling::isotropic(-0.15));
  CHECK_NOTHROW(validate(spec));
}

TEST_CASE("case I ring: system bonds fixed, others random in range") {
  const ModelSpec spec = ring(4, 2, CouplingCase::I, 9);
  REQUIRE(spec.bonds.size() == 6);
  int random_bonds = 0;
  for (const Bond& b : spec.bonds) {
    if (sector_of(b, 4) == Sector::system) {
      CHECK(b.strength == Coupling::isotropic(-0.15));
    } else {
      ++random_bonds;
      for (double v : {b.strength.x, b.strength.y, b.strength.z}) {
        CHECK(v >= -0.2);
        CHECK(v <= 0.2);
      }
      CHECK(b.strength.x != b.strength.y);
    }
  }
  CHECK(random_bonds == 3);
}

TEST_CASE("two-site ring collapses to one bond") {
  const ModelSpec spec = ring(1, 1, CouplingCase::II);
  REQUIRE(spec.bonds.size() == 1);
  CHECK(spec.bonds[0].site_a == 0);
  CHECK(spec.bonds[0].site_b == 1);
}

TEST_CASE("ring bond list is unique and sorted per pair for many sizes") {
  for (int ns = 1; ns <= 4; ++ns)
    for (int ne = 1; ne <= 8; ++ne) {
      const ModelSpec spec = ring(ns, ne, CouplingCase::I, 100 + ns * 10 + ne);
      CHECK_NOTHROW(validate(spec));
      const int n = ns + ne;
      CHECK(static_cast<int>(spec.bonds.size()) == (n == 2 ? 1 : n));
    }
}

TEST_CASE("same coupling seed gives the same model") {
  CHECK(ring(4, 8, CouplingCase::I, 5) == ring(4, 8, CouplingCase::I, 5));
  CHECK_FALSE(ring(4, 8, CouplingCase::I, 5) == ring(4, 8, CouplingCase::I, 6));
}

TEST_CASE("environment SWBs nest as the count grows") {
  const ModelSpec base = ring(4, 20, CouplingCase::I);
  for (int m = 1; m < 8; ++m) {
    Rng r1(77), r2(77);
    const ModelSpec small = add_env_swbs(base, m, r1);
    const ModelSpec large = add_env_swbs(base, m + 1, r2);
    CHECK(large.bonds.size() == base.bonds.size() + static_cast<std::size_t>(m) + 1);
    CHECK(contains_all(large, small));
  }
}

TEST_CASE("environment SWBs only join non-adjacent environment spins") {
  const ModelSpec base = ring(4, 10, CouplingCase::II);
  Rng rng(8);
  const ModelSpec spec = add_env_swbs(base, 12, rng);
  for (std::size_t i = base.bonds.size(); i < spec.bonds.size(); ++i) {
    const Bond& b = spec.bonds[i];
    CHECK(sector_of(b, 4) == Sector::environment);
    CHECK(b.site_b - b.site_a > 1);
    CHECK(b.strength == Coupling::isotropic(-0.15));
  }
  CHECK_NOTHROW(validate(spec));
}

TEST_CASE("environment SWBs: zero count and exhausted pool") {
  const ModelSpec base = ring(4, 4, CouplingCase::I);
  Rng rng(1);
  CHECK(add_env_swbs(base, 0, rng) == base);
  // Env spins 4..7 carry ring bonds (4,5), (5,6), (6,7); three pairs remain.
  Rng r2(2);
  const ModelSpec full = add_env_swbs(base, 3, r2);
  CHECK(full.has_bond(4, 6));
  CHECK(full.has_bond(4, 7));
  CHECK(full.has_bond(5, 7));
  Rng r3(3);
  CHECK_THROWS_AS(add_env_swbs(base, 4, r3), std::invalid_argument);
}

TEST_CASE("system-environment SWBs respect K") {
  const ModelSpec base = ring(4, 16, CouplingCase::I);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng r1(seed);
    const ModelSpec k1 = add_se_swbs(base, 8, 1, r1);
    CHECK(realized_k(k1) <= 1);
    CHECK(count_sector(k1, Sector::system_environment) == 2 + 8);
    Rng r2(seed);
    const ModelSpec k2 = add_se_swbs(base, 8, 2, r2);
    CHECK(realized_k(k2) <= 2);
    CHECK_NOTHROW(validate(k2));
  }
  Rng r(1);
  CHECK(add_se_swbs(base, 0, 1, r) == base);
}

TEST_CASE("system-environment SWBs can reach K = 2 when allowed") {
  // Three env spins with room for two SWBs each: six fill every slot.
  const ModelSpec base = ring(4, 3, CouplingCase::I);
  Rng rng(4);
  const ModelSpec spec = add_se_swbs(base, 6, 2, rng);
  CHECK(realized_k(spec) == 2);
  Rng r2(4);
  CHECK_THROWS_AS(add_se_swbs(base, 7, 2, r2), std::invalid_argument);
}

TEST_CASE("system-environment SWBs nest as the count grows") {
  const ModelSpec base = ring(4, 12, CouplingCase::I);
  for (int m = 1; m < 8; ++m) {
    Rng r1(5), r2(5);
    CHECK(contains_all(add_se_swbs(base, m + 1, 1, r2), add_se_swbs(base, m, 1, r1)));
  }
}

TEST_CASE("all-to-all environment completes the environment graph") {
  for (int ne : {3, 4, 5, 9}) {
    const ModelSpec base = ring(4, ne, CouplingCase::I);
    Rng rng(6);
    const ModelSpec full = add_all_to_all_env(base, rng);
    CHECK(count_sector(full, Sector::environment) == ne * (ne - 1) / 2);
    CHECK(full.bonds.size() - base.bonds.size() ==
          static_cast<std::size_t>(ne * (ne - 1) / 2 - (ne - 1)));
    Rng again(7);
    CHECK(add_all_to_all_env(full, again) == full);
  }
}

TEST_CASE("random bond replacement nests and keeps topology") {
  const ModelSpec base = ring(4, 14, CouplingCase::II);
  Rng r0(1);
  CHECK(replace_random_env_bonds(base, 0, 0.2, r0) == base);
  for (int m = 1; m < 6; ++m) {
    Rng r1(31), r2(31);
    const ModelSpec small = replace_random_env_bonds(base, m, 0.2, r1);
    const ModelSpec large = replace_random_env_bonds(base, m + 1, 0.2, r2);
    REQUIRE(small.bonds.size() == base.bonds.size());
    int changed_small = 0;
    for (std::size_t i = 0; i < base.bonds.size(); ++i) {
      CHECK(small.bonds[i].site_a == base.bonds[i].site_a);
      CHECK(small.bonds[i].site_b == base.bonds[i].site_b);
      if (!(small.bonds[i] == base.bonds[i])) {
        ++changed_small;
        CHECK(sector_of(small.bonds[i], 4) == Sector::environment);
        CHECK(large.bonds[i] == small.bonds[i]);
      }
    }
    CHECK(changed_small == m);
  }
  Rng r3(1);
  CHECK_THROWS_AS(replace_random_env_bonds(ring(4, 6, CouplingCase::I), 1, 0.2, r3),
                  std::invalid_argument);
}

TEST_CASE("spectral bound") {
  CHECK(spectral_bound(ring(4, 4, CouplingCase::II)) == doctest::Approx(0.9).epsilon(1e-14));
  ModelSpec empty;
  empty.n_system = 1;
  empty.n_env = 1;
  CHECK(spectral_bound(empty) == 1e-12);
}

TEST_CASE("spectral bound dominates the dense spectrum") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    Rng rng(seed);
    ModelSpec spec = ring(1 + static_cast<int>(seed % 3), 3 + static_cast<int>(seed % 3),
                          seed % 2 ? CouplingCase::I : CouplingCase::II, seed);
    spec = add_env_swbs(spec, 1, rng);
    const SystemEigenbasis eig = hermitian_eigendecomposition(dense_hamiltonian(spec));
    const double a = spectral_bound(spec);
    CHECK(std::abs(eig.energies.front()) <= a);
    CHECK(std::abs(eig.energies.back()) <= a);
  }
}

TEST_CASE("serialized models parse back and reject damage") {
  ModelSpec spec = ring(4, 6, CouplingCase::I, 12);
  Rng rng(3);
  spec = add_env_swbs(spec, 2, rng);
  const std::string text = serialize(spec);
  CHECK(parse_model_spec(text) == spec);
  CHECK_THROWS(parse_model_spec("decoh-model 9\n"));
  CHECK_THROWS(parse_model_spec(text.substr(0, text.size() - 20)));
}

TEST_CASE("coupling case names") {
  CHECK(parse_coupling_case("I") == CouplingCase::I);
  CHECK(parse_coupling_case("II") == CouplingCase::II);
  CHECK_THROWS_AS(parse_coupling_case("III"), std::invalid_argument);
}
