#include "decoh/observables.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "decoh/parallel.hpp"

namespace decoh {

namespace {

constexpr double kHermitianInputTol = 1e-12;
constexpr double kJacobiTol = 1e-14;
constexpr int kMaxJacobiSweeps = 100;
constexpr double kMinPopulation = 1e-300;

struct OffDiagonalMass {
  double off = 0.0;
  double diag = 0.0;
};

OffDiagonalMass mass(const ComplexMatrix& a) {
  OffDiagonalMass m;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      (i == j ? m.diag : m.off) += std::norm(a(i, j));
  return m;
}

// One complex Jacobi rotation zeroing a(p, q), p < q. The rotation is the
// real Jacobi rotation applied after the phase change that makes a(p, q)
// real: G = diag(1, e^{-i phi}) * [[c, s], [-s, c]] on rows/columns (p, q).
// `a` stays Hermitian, so only columns p and q are computed (read through
// the contiguous rows) and mirrored. `vt` holds the eigenvectors as rows.
void rotate(ComplexMatrix& a, ComplexMatrix& vt, std::size_t p, std::size_t q) {
  const Amplitude apq = a(p, q);
  const double g = std::abs(apq);
  if (g == 0.0) return;
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  // Negligible against both diagonal entries: the rotation would be a no-op.
  if (g < 1e-3 * kJacobiTol * (std::abs(app) + std::abs(aqq))) return;
  const Amplitude phase = apq / g;
  const Amplitude phase_conj = std::conj(phase);

  const double theta = (aqq - app) / (2.0 * g);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 0.5 / theta;
  } else {
    t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    if (theta < 0.0) t = -t;
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const Amplitude s_pc = s * phase_conj;
  const Amplitude c_pc = c * phase_conj;
  const std::size_t n = a.dim();

  Amplitude* row_p = &a(p, 0);
  Amplitude* row_q = &a(q, 0);
  for (std::size_t k = 0; k < n; ++k) {
    if (k == p || k == q) continue;
    const Amplitude akp = std::conj(row_p[k]);
    const Amplitude akq = std::conj(row_q[k]);
    const Amplitude new_kp = c * akp - s_pc * akq;
    const Amplitude new_kq = s * akp + c_pc * akq;
    a(k, p) = new_kp;
    a(k, q) = new_kq;
    row_p[k] = std::conj(new_kp);
    row_q[k] = std::conj(new_kq);
  }
  a(p, q) = a(q, p) = 0.0;
  a(p, p) = app - t * g;
  a(q, q) = aqq + t * g;

  Amplitude* vp = &vt(p, 0);
  Amplitude* vq = &vt(q, 0);
  for (std::size_t k = 0; k < n; ++k) {
    const Amplitude x = vp[k];
    const Amplitude y = vq[k];
    vp[k] = c * x - s_pc * y;
    vq[k] = s * x + c_pc * y;
  }
}

// Index of the largest-modulus component of eigenvector `k` (row k of vt);
// ties go to the lowest index.
std::size_t dominant_row(const ComplexMatrix& vt, std::size_t k) {
  std::size_t best = 0;
  double best_abs = -1.0;
  for (std::size_t r = 0; r < vt.dim(); ++r) {
    const double m = std::abs(vt(k, r));
    if (m > best_abs + 1e-12) {
      best_abs = m;
      best = r;
    }
  }
  return best;
}

void check_dims(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
}

void check_predict_domain(std::uint64_t d_system, std::uint64_t d_env) {
  if (d_system < 2) throw std::domain_error("prediction requires D_S >= 2");
  if (d_env < 1) throw std::domain_error("prediction requires D_E >= 1");
}

}  // namespace

SystemEigenbasis hermitian_eigendecomposition(const ComplexMatrix& matrix,
                                              double degeneracy_tol) {
  const std::size_t n = matrix.dim();
  if (n == 0 || n > kMaxEigenDim)
    throw std::invalid_argument("hermitian_eigendecomposition: dimension " + std::to_string(n) +
                                " outside [1, " + std::to_string(kMaxEigenDim) + "]");
  double scale = 1.0;
  for (const Amplitude& x : matrix.data()) scale = std::max(scale, std::abs(x));
  if (hermiticity_error(matrix) > kHermitianInputTol * scale)
    throw std::invalid_argument("hermitian_eigendecomposition: matrix is not Hermitian");

  ComplexMatrix a(n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = matrix(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      a(i, j) = 0.5 * (matrix(i, j) + std::conj(matrix(j, i)));
      a(j, i) = std::conj(a(i, j));
    }
  }
  ComplexMatrix vt = ComplexMatrix::identity(n);

  bool converged = false;
  for (int sweep = 0; sweep < kMaxJacobiSweeps && !converged; ++sweep) {
    const OffDiagonalMass m = mass(a);
    if (std::sqrt(m.off) <= kJacobiTol * std::sqrt(m.diag) || m.off == 0.0) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) rotate(a, vt, p, q);
  }
  if (!converged) {
    const OffDiagonalMass m = mass(a);
    if (std::sqrt(m.off) > 1e3 * kJacobiTol * std::sqrt(m.diag))
      throw std::runtime_error("hermitian_eigendecomposition: Jacobi did not converge");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a(x, x).real() < a(y, y).real();
  });
  std::vector<std::size_t> dominant(n);
  for (std::size_t k = 0; k < n; ++k) dominant[k] = dominant_row(vt, k);
  for (std::size_t lo = 0; lo < n;) {
    std::size_t hi = lo + 1;
    while (hi < n && a(order[hi], order[hi]).real() - a(order[hi - 1], order[hi - 1]).real() <=
                         degeneracy_tol)
      ++hi;
    std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(lo),
                     order.begin() + static_cast<std::ptrdiff_t>(hi),
                     [&](std::size_t x, std::size_t y) { return dominant[x] < dominant[y]; });
    lo = hi;
  }

  SystemEigenbasis basis;
  basis.degeneracy_tol = degeneracy_tol;
  basis.energies.resize(n);
  basis.vectors = ComplexMatrix(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    basis.energies[k] = a(src, src).real();
    const Amplitude lead = vt(src, dominant[src]);
    const Amplitude unphase = std::abs(lead) > 0.0 ? std::conj(lead) / std::abs(lead) : 1.0;
    for (std::size_t r = 0; r < n; ++r) basis.vectors(r, k) = vt(src, r) * unphase;
    basis.vectors(dominant[src], k) = std::abs(lead);
  }
  return basis;
}

ComplexMatrix partial_trace(std::span<const Amplitude> psi, std::size_t d_system) {
  if (d_system == 0 || psi.size() % d_system != 0)
    throw std::invalid_argument("partial_trace: state length not divisible by D_S");
  const std::size_t d_env = psi.size() / d_system;
  const std::size_t env_chunk = std::max<std::size_t>(1, kReductionChunk / d_system);

  ComplexMatrix rho = ordered_chunk_sum(
      d_env, env_chunk, ComplexMatrix(d_system), [&](std::size_t p0, std::size_t p1) {
        ComplexMatrix part(d_system);
        for (std::size_t p = p0; p < p1; ++p) {
          const Amplitude* row = psi.data() + p * d_system;
          for (std::size_t i = 0; i < d_system; ++i) {
            const Amplitude ci = row[i];
            for (std::size_t j = i; j < d_system; ++j) part(i, j) += ci * std::conj(row[j]);
          }
        }
        return part;
      });
  for (std::size_t i = 0; i < d_system; ++i) {
    rho(i, i) = rho(i, i).real();
    for (std::size_t j = i + 1; j < d_system; ++j) rho(j, i) = std::conj(rho(i, j));
  }
  return rho;
}

ReducedDensityMatrix reduce(const StateVector& psi, int n_system) {
  if (n_system < 0 || n_system > psi.n_qubits())
    throw std::invalid_argument("reduce: n_system " + std::to_string(n_system) +
                                " outside [0, " + std::to_string(psi.n_qubits()) + "]");
  return {partial_trace(psi.amplitudes(), std::size_t{1} << n_system)};
}

ReducedDensityMatrix to_energy_basis(const ReducedDensityMatrix& rdm,
                                     const SystemEigenbasis& basis) {
  check_dims(rdm.dim(), basis.vectors.dim(), "to_energy_basis");
  const ComplexMatrix& v = basis.vectors;
  ComplexMatrix out = v.adjoint() * rdm.entries * v;
  for (std::size_t i = 0; i < out.dim(); ++i) {
    out(i, i) = out(i, i).real();
    for (std::size_t j = i + 1; j < out.dim(); ++j) {
      const Amplitude avg = 0.5 * (out(i, j) + std::conj(out(j, i)));
      out(i, j) = avg;
      out(j, i) = std::conj(avg);
    }
  }
  return {std::move(out)};
}

double sigma(const ComplexMatrix& rdm) {
  double s = 0.0;
  for (std::size_t i = 0; i < rdm.dim(); ++i)
    for (std::size_t j = i + 1; j < rdm.dim(); ++j) s += std::norm(rdm(i, j));
  return std::sqrt(s);
}

DiagonalFit delta_and_b(const ComplexMatrix& rdm, std::span<const double> energies,
                        double degeneracy_tol, ReferenceProfile mode) {
  const std::size_t n = rdm.dim();
  check_dims(n, energies.size(), "delta_and_b");
  std::vector<double> pop(n);
  for (std::size_t i = 0; i < n; ++i) pop[i] = rdm(i, i).real();

  DiagonalFit fit;
  std::vector<double> profile(n, 1.0 / static_cast<double>(n));
  if (mode == ReferenceProfile::fitted) {
    for (double p : pop)
      if (!(p >= kMinPopulation))
        throw std::domain_error("delta_and_b: population below 1e-300 cannot be fitted");
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double gap = energies[j] - energies[i];
        if (std::abs(gap) <= degeneracy_tol) continue;
        sum += (std::log(pop[i]) - std::log(pop[j])) / gap;
        ++pairs;
      }
    if (pairs == 0) throw std::domain_error("delta_and_b: no non-degenerate energy pair");
    fit.b = sum / static_cast<double>(pairs);

    const double e_min = *std::min_element(energies.begin(), energies.end());
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) z += profile[i] = std::exp(-fit.b * (energies[i] - e_min));
    for (double& p : profile) p /= z;
  }
  double d2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) d2 += (pop[i] - profile[i]) * (pop[i] - profile[i]);
  fit.delta = std::sqrt(d2);
  return fit;
}

PurityReport purity_report(const ComplexMatrix& rdm) {
  PurityReport r;
  for (std::size_t i = 0; i < rdm.dim(); ++i) {
    const double d = rdm(i, i).real();
    r.trace_diag_sq += d * d;
    for (std::size_t j = 0; j < rdm.dim(); ++j) r.purity += std::norm(rdm(i, j));
  }
  return r;
}

double predicted_sigma(std::uint64_t d_system, std::uint64_t d_env) {
  check_predict_domain(d_system, d_env);
  const double ds = static_cast<double>(d_system);
  const double de = static_cast<double>(d_env);
  return std::sqrt((ds - 1.0) / (2.0 * (ds * de + 1.0)));
}

double predicted_sigma_isolated(std::uint64_t d_system) {
  check_predict_domain(d_system, 1);
  const double ds = static_cast<double>(d_system);
  return std::sqrt((ds - 1.0) / (2.0 * (ds + 1.0)));
}

double predicted_delta(std::uint64_t d_system, std::uint64_t d_env) {
  check_predict_domain(d_system, d_env);
  const double ds = static_cast<double>(d_system);
  const double de = static_cast<double>(d_env);
  return std::sqrt((ds - 1.0) / (ds * (ds * de + 1.0)));
}

std::vector<OffDiagonalComponent> offdiag_components(const ComplexMatrix& rdm) {
  std::vector<OffDiagonalComponent> out;
  out.reserve(rdm.dim() * (rdm.dim() - (rdm.dim() > 0 ? 1 : 0)) / 2);
  for (std::size_t i = 0; i < rdm.dim(); ++i)
    for (std::size_t j = i + 1; j < rdm.dim(); ++j) out.push_back({i, j, std::abs(rdm(i, j))});
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& x, const auto& y) { return x.modulus > y.modulus; });
  return out;
}

void write_matrix_dump(std::ostream& out, const ComplexMatrix& m) {
  out << "dim " << m.dim() << '\n';
  char buf[96];
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) {
      std::snprintf(buf, sizeof buf, "%zu %zu %.17g %.17g\n", i, j, m(i, j).real(),
                    m(i, j).imag());
      out << buf;
    }
}

}  // namespace decoh
