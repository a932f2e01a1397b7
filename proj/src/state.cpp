#include "decoh/state.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace decoh {

namespace {

constexpr std::array<char, 8> kMagic = {'D', 'C', 'H', 'S', 'T', 'A', 'T', 'E'};
constexpr std::uint32_t kCheckpointVersion = 1;
// System bits low, bit 1 = down.
constexpr std::uint32_t kConventionTag = 0x4C44;

void check_qubits(int n_qubits, int max_qubits = kMaxQubits) {
  if (n_qubits < 1) throw std::invalid_argument("state needs at least one qubit");
  if (n_qubits > max_qubits)
    throw std::length_error("state of " + std::to_string(n_qubits) +
                            " qubits exceeds the limit of " + std::to_string(max_qubits));
}

template <class T>
void put_le(std::ostream& out, T value) {
  static_assert(std::endian::native == std::endian::little,
                "checkpoint I/O assumes a little-endian host");
  out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <class T>
T get_le(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof value);
  if (!in) throw std::runtime_error("checkpoint: truncated input");
  return value;
}

}  // namespace

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
  check_qubits(n_qubits);
  amplitudes_.assign(std::size_t{1} << n_qubits, Amplitude{});
}

StateVector::StateVector(int n_qubits, std::vector<Amplitude> amplitudes)
    : n_qubits_(n_qubits), amplitudes_(std::move(amplitudes)) {
  check_qubits(n_qubits);
  if (amplitudes_.size() != (std::size_t{1} << n_qubits))
    throw std::invalid_argument("amplitude count does not match 2^n_qubits");
}

double StateVector::norm() const { return norm2(amplitudes_); }

void StateVector::normalize() {
  const double n = norm();
  if (n == 0.0) throw std::domain_error("cannot normalize the zero vector");
  const double inv = 1.0 / n;
  for (Amplitude& a : amplitudes_) a *= inv;
}

std::vector<Amplitude> random_unit_amplitudes(std::size_t dim, Rng& rng) {
  if (dim == 0) throw std::invalid_argument("random_unit_amplitudes: empty vector");
  std::vector<Amplitude> v(dim);
  for (Amplitude& a : v) {
    const double re = rng.normal();
    const double im = rng.normal();
    a = {re, im};
  }
  const double inv = 1.0 / norm2(v);
  for (Amplitude& a : v) a *= inv;
  return v;
}

StateVector random_hypersphere_state(int n_qubits, Rng& rng) {
  check_qubits(n_qubits);
  return StateVector(n_qubits, random_unit_amplitudes(std::size_t{1} << n_qubits, rng));
}

StateVector basis_product_state(std::span<const Spin> pattern) {
  if (pattern.empty()) throw std::invalid_argument("basis_product_state: empty pattern");
  std::size_t index = 0;
  for (std::size_t s = 0; s < pattern.size(); ++s)
    if (pattern[s] == Spin::down) index |= std::size_t{1} << s;
  StateVector state(static_cast<int>(pattern.size()));
  state[index] = 1.0;
  return state;
}

StateVector basis_product_state(std::string_view pattern) {
  std::vector<Spin> spins;
  spins.reserve(pattern.size());
  for (char c : pattern) {
    if (c == 'U' || c == 'u') spins.push_back(Spin::up);
    else if (c == 'D' || c == 'd') spins.push_back(Spin::down);
    else throw std::invalid_argument(std::string("basis_product_state: bad spin '") + c + "'");
  }
  return basis_product_state(std::span<const Spin>(spins));
}

StateVector tensor(const StateVector& system, const StateVector& env, int max_qubits) {
  const int n = system.n_qubits() + env.n_qubits();
  check_qubits(n, max_qubits);
  StateVector out(n);
  const std::size_t ds = system.dim();
  for (std::size_t p = 0; p < env.dim(); ++p) {
    const Amplitude e = env[p];
    for (std::size_t i = 0; i < ds; ++i) out[p * ds + i] = system[i] * e;
  }
  return out;
}

StateVector udud_y(int n_env, Rng& rng) {
  if (n_env < 1) throw std::invalid_argument("udud_y: n_env must be >= 1");
  return tensor(basis_product_state("UDUD"), random_hypersphere_state(n_env, rng));
}

void write_checkpoint(std::ostream& out, const StateVector& state) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kCheckpointVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(state.n_qubits()));
  put_le<std::uint32_t>(out, kConventionTag);
  for (const Amplitude& a : state.amplitudes()) {
    put_le<double>(out, a.real());
    put_le<double>(out, a.imag());
  }
  if (!out) throw std::runtime_error("checkpoint: write failed");
}

StateVector read_checkpoint(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw std::runtime_error("checkpoint: bad magic");
  if (get_le<std::uint32_t>(in) != kCheckpointVersion)
    throw std::runtime_error("checkpoint: unsupported version");
  const auto n_qubits = static_cast<int>(get_le<std::uint32_t>(in));
  if (get_le<std::uint32_t>(in) != kConventionTag)
    throw std::runtime_error("checkpoint: unknown basis convention");
  check_qubits(n_qubits);
  std::vector<Amplitude> amps(std::size_t{1} << n_qubits);
  for (Amplitude& a : amps) {
    const double re = get_le<double>(in);
    const double im = get_le<double>(in);
    a = {re, im};
  }
  return StateVector(n_qubits, std::move(amps));
}

}  // namespace decoh
