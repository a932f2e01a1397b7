#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "decoh/linalg.hpp"
#include "decoh/state.hpp"

namespace decoh {

/// D_S x D_S reduced density matrix of the system spins; Hermitian with
/// unit trace.
struct ReducedDensityMatrix {
  ComplexMatrix entries;

  std::size_t dim() const { return entries.dim(); }
  Amplitude operator()(std::size_t i, std::size_t j) const { return entries(i, j); }
};

inline constexpr double kDegeneracyTolerance = 1e-10;

/// Eigenpairs of a Hermitian matrix: energies ascending, vectors as the
/// columns of a unitary matrix.
struct SystemEigenbasis {
  std::vector<double> energies;
  ComplexMatrix vectors;
  double degeneracy_tol = kDegeneracyTolerance;
};

/// Cyclic Jacobi diagonalization.
///
/// Eigenpairs are sorted by eigenvalue. Within a cluster of eigenvalues
/// closer than `degeneracy_tol` they are ordered by the row of each
/// vector's largest-magnitude component, and every vector is rotated so that
/// this component is real and positive. The rotation sequence is fixed, so
/// repeated calls on the same matrix return the same basis.
SystemEigenbasis hermitian_eigendecomposition(const ComplexMatrix& matrix,
                                              double degeneracy_tol = kDegeneracyTolerance);

inline constexpr std::size_t kMaxEigenDim = 1024;

/// rho(i, j) = sum_p psi[p * d_system + i] * conj(psi[p * d_system + j]).
ComplexMatrix partial_trace(std::span<const Amplitude> psi, std::size_t d_system);

ReducedDensityMatrix reduce(const StateVector& psi, int n_system);

/// V^dagger rho V.
ReducedDensityMatrix to_energy_basis(const ReducedDensityMatrix& rdm,
                                     const SystemEigenbasis& basis);

/// Root-sum-square of the strict upper triangle.
double sigma(const ComplexMatrix& rdm);
inline double sigma(const ReducedDensityMatrix& rdm) { return sigma(rdm.entries); }

enum class ReferenceProfile {
  fitted,   // Boltzmann profile at the pairwise log-ratio inverse temperature
  uniform,  // b = 0, every population 1/D_S
};

struct DiagonalFit {
  double delta = 0.0;  // distance of the diagonal from the reference profile
  double b = 0.0;      // inverse temperature of the profile
};

/// Throws std::domain_error in fitted mode when a diagonal entry is below
/// 1e-300 or when no pair of energies is separated by more than
/// degeneracy_tol.
DiagonalFit delta_and_b(const ComplexMatrix& rdm, std::span<const double> energies,
                        double degeneracy_tol, ReferenceProfile mode);

struct PurityReport {
  double purity = 0.0;         // Tr(rho^2)
  double trace_diag_sq = 0.0;  // sum_i rho_ii^2
};

PurityReport purity_report(const ComplexMatrix& rdm);

// Closed forms for states drawn uniformly from the unit hypersphere.

/// sqrt((D_S - 1) / (2 (D_S D_E + 1))).
double predicted_sigma(std::uint64_t d_system, std::uint64_t d_env);
/// Same without an environment: sqrt((D_S - 1) / (2 (D_S + 1))).
double predicted_sigma_isolated(std::uint64_t d_system);
/// sqrt((D_S - 1) / (D_S (D_S D_E + 1))), deviation of the populations
/// from 1/D_S.
double predicted_delta(std::uint64_t d_system, std::uint64_t d_env);

struct OffDiagonalComponent {
  std::size_t i = 0;
  std::size_t j = 0;
  double modulus = 0.0;
};

/// Strict upper triangle as (i, j, |rho_ij|), largest modulus first.
std::vector<OffDiagonalComponent> offdiag_components(const ComplexMatrix& rdm);

/// Full matrix as text, one "i j re im" line per entry, 17 significant digits.
void write_matrix_dump(std::ostream& out, const ComplexMatrix& m);

}  // namespace decoh
