#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "decoh/linalg.hpp"
#include "decoh/rng.hpp"

namespace decoh {

// Basis convention: amplitude index n = p * D_S + i, with the system spins
// in the low bits. Bit s set means spin s points down, so index 0 is the
// all-up state.

/// Resource guard on the number of qubits a single vector may hold.
inline constexpr int kMaxQubits = 28;

enum class Spin { up, down };

class StateVector {
 public:
  StateVector() = default;
  /// Zero vector on n_qubits spins.
  explicit StateVector(int n_qubits);
  StateVector(int n_qubits, std::vector<Amplitude> amplitudes);

  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return amplitudes_.size(); }

  std::span<Amplitude> amplitudes() { return amplitudes_; }
  std::span<const Amplitude> amplitudes() const { return amplitudes_; }

  Amplitude& operator[](std::size_t n) { return amplitudes_[n]; }
  const Amplitude& operator[](std::size_t n) const { return amplitudes_[n]; }

  double norm() const;
  void normalize();

  bool operator==(const StateVector&) const = default;

 private:
  int n_qubits_ = 0;
  std::vector<Amplitude> amplitudes_;
};

/// Unit vector of any length with i.i.d. standard normal real and imaginary
/// parts before normalization.
std::vector<Amplitude> random_unit_amplitudes(std::size_t dim, Rng& rng);

/// Gaussian real and imaginary parts for every amplitude, then normalized:
/// a point drawn uniformly from the unit hypersphere.
StateVector random_hypersphere_state(int n_qubits, Rng& rng);

StateVector basis_product_state(std::span<const Spin> pattern);
/// Pattern of 'U'/'D' characters, first character = spin 0.
StateVector basis_product_state(std::string_view pattern);

/// out[p * D_S + i] = system[i] * env[p].
StateVector tensor(const StateVector& system, const StateVector& env,
                   int max_qubits = kMaxQubits);

/// |up down up down> on the four system spins times a random environment state.
StateVector udud_y(int n_env, Rng& rng);

// Binary checkpoint: magic "DCHSTATE", u32 version, u32 n_qubits,
// u32 convention tag, then 2^n little-endian (re, im) double pairs.
void write_checkpoint(std::ostream& out, const StateVector& state);
StateVector read_checkpoint(std::istream& in);

}  // namespace decoh
