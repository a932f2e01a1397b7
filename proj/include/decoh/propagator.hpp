#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "decoh/linalg.hpp"
#include "decoh/spin_model.hpp"
#include "decoh/state.hpp"

namespace decoh {

/// H of a ModelSpec compiled into a bit-indexed matrix-free operator.
///
/// Each bond (a, b) contributes a diagonal term, -Jz/4 when bits a and b
/// agree and +Jz/4 otherwise, and a two-bit flip |n> -> |n ^ mask> with
/// weight -(Jx - Jy)/4 when the bits agree and -(Jx + Jy)/4 when they
/// differ. Output amplitudes are assembled block by block, each from a fixed
/// sequence of terms, so results do not depend on the worker count.
class SpinOperator {
 public:
  explicit SpinOperator(const ModelSpec& spec);

  int n_sites() const { return n_sites_; }
  std::size_t dim() const { return diagonal_.size(); }

  /// out = H in.
  void apply(std::span<const Amplitude> in, std::span<Amplitude> out) const;

  /// One Chebyshev recurrence step with H~ = scale * H:
  ///   prev <- 2 H~ cur - prev,   acc += coef * prev.
  void recurrence_step(std::span<const Amplitude> cur, std::span<Amplitude> prev,
                       double scale, Amplitude coef, std::span<Amplitude> acc) const;

  /// First Chebyshev term: first <- H~ in, acc = c0 * in + c1 * first.
  void first_step(std::span<const Amplitude> in, std::span<Amplitude> first, double scale,
                  Amplitude c0, Amplitude c1, std::span<Amplitude> acc) const;

 private:
  struct FlipTerm {
    int bit_a;
    int bit_b;
    std::size_t mask;
    double same;    // weight when bits a and b agree
    double differ;  // weight when they differ
  };

  template <class Sink>
  void sweep(std::span<const Amplitude> in, Sink&& sink) const;

  int n_sites_ = 0;
  int block_bits_ = 0;
  std::vector<double> diagonal_;
  std::vector<FlipTerm> flips_;
};

/// H|psi>, unnormalized.
std::vector<Amplitude> apply_hamiltonian(const ModelSpec& spec, const StateVector& psi);

/// <psi|H|psi> (real part; H is Hermitian).
double energy(const SpinOperator& op, const StateVector& psi);

struct ChebyshevPlan {
  int n_sites = 0;
  double radius = 0.0;   // a >= ||H||
  double tau = 0.0;
  double epsilon = 0.0;
  int term_count = 0;    // K; coefficients hold c_0 .. c_K
  std::vector<Amplitude> coefficients;  // c_k = (-i)^k J_k(a tau)
};

inline constexpr double kDefaultTruncation = 1e-15;

ChebyshevPlan make_plan(const ModelSpec& spec, double tau,
                        double epsilon = kDefaultTruncation);

/// Plan for an explicit scaling radius, independent of any model.
ChebyshevPlan make_plan_for_radius(int n_sites, double radius, double tau,
                                   double epsilon = kDefaultTruncation);

/// Owns the compiled operator and the two scratch vectors of the
/// three-term recurrence; advances a state in place by e^{-i tau H}.
class ChebyshevStepper {
 public:
  ChebyshevStepper(const ModelSpec& spec, ChebyshevPlan plan);

  const ChebyshevPlan& plan() const { return plan_; }
  const SpinOperator& op() const { return op_; }

  void step(StateVector& psi);

 private:
  SpinOperator op_;
  ChebyshevPlan plan_;
  std::vector<Amplitude> prev_;
  std::vector<Amplitude> cur_;
};

/// e^{-i tau H} psi for the plan's tau.
StateVector chebyshev_step(const ModelSpec& spec, const ChebyshevPlan& plan,
                           const StateVector& psi);

/// Dense 2^N x 2^N Hamiltonian from explicit Kronecker products of Pauli
/// matrices. Independent of SpinOperator; used as a verification oracle.
ComplexMatrix dense_hamiltonian(int n_sites, std::span<const Bond> bonds);
ComplexMatrix dense_hamiltonian(const ModelSpec& spec);

/// Dense H_S on the system spins only.
ComplexMatrix system_hamiltonian(const ModelSpec& spec);

inline constexpr int kMaxDenseSites = 10;

/// V e^{-i t Lambda} V^dagger psi from a full eigendecomposition of H.
StateVector dense_evolve_oracle(const ModelSpec& spec, const StateVector& psi, double t);

}  // namespace decoh
