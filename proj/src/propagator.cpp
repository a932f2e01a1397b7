#include "decoh/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "decoh/bessel.hpp"
#include "decoh/observables.hpp"
#include "decoh/parallel.hpp"

namespace decoh {

namespace {

constexpr int kMaxBlockBits = 11;

void check_size(std::span<const Amplitude> v, std::size_t dim, const char* what) {
  if (v.size() != dim)
    throw std::invalid_argument(std::string(what) + ": vector length " +
                                std::to_string(v.size()) + " != operator dimension " +
                                std::to_string(dim));
}

}  // namespace

SpinOperator::SpinOperator(const ModelSpec& spec)
    : n_sites_(spec.n_sites()), block_bits_(std::min(spec.n_sites(), kMaxBlockBits)) {
  validate(spec);
  if (n_sites_ > kMaxQubits)
    throw std::length_error("SpinOperator: " + std::to_string(n_sites_) + " sites exceed limit");
  const std::size_t dim = std::size_t{1} << n_sites_;

  struct ZTerm {
    int a, b;
    double quarter;
  };
  std::vector<ZTerm> zterms;
  for (const Bond& bond : spec.bonds) {
    const Coupling& j = bond.strength;
    if (j.z != 0.0) zterms.push_back({bond.site_a, bond.site_b, j.z / 4.0});
    FlipTerm flip{bond.site_a, bond.site_b,
                  (std::size_t{1} << bond.site_a) | (std::size_t{1} << bond.site_b),
                  -(j.x - j.y) / 4.0, -(j.x + j.y) / 4.0};
    if (flip.same != 0.0 || flip.differ != 0.0) flips_.push_back(flip);
  }

  diagonal_.assign(dim, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t sn = 0; sn < static_cast<std::ptrdiff_t>(dim); ++sn) {
    const auto n = static_cast<std::size_t>(sn);
    double d = 0.0;
    for (const ZTerm& z : zterms)
      d += (((n >> z.a) ^ (n >> z.b)) & 1U) ? z.quarter : -z.quarter;
    diagonal_[n] = d;
  }
}

template <class Sink>
void SpinOperator::sweep(std::span<const Amplitude> in, Sink&& sink) const {
  const std::size_t block = std::size_t{1} << block_bits_;
  const auto n_blocks = static_cast<std::ptrdiff_t>(dim() >> block_bits_);
  const Amplitude* psi = in.data();
  const double* diag = diagonal_.data();

#pragma omp parallel
  {
    std::vector<Amplitude> h(block);
#pragma omp for schedule(static)
    for (std::ptrdiff_t bi = 0; bi < n_blocks; ++bi) {
      const std::size_t base = static_cast<std::size_t>(bi) << block_bits_;
      const Amplitude* own = psi + base;
      for (std::size_t i = 0; i < block; ++i) h[i] = diag[base + i] * own[i];

      // Plain double views keep the inner loops free of complex-arithmetic
      // library calls and let the compiler vectorize them.
      double* hd = reinterpret_cast<double*>(h.data());
      for (const FlipTerm& f : flips_) {
        if (f.bit_a >= block_bits_) {
          // Both bits above the block: one weight for the whole block, and
          // the partner amplitudes form another contiguous block.
          const bool differ = ((base >> f.bit_a) ^ (base >> f.bit_b)) & 1U;
          const double w = differ ? f.differ : f.same;
          if (w == 0.0) continue;
          const double* src = reinterpret_cast<const double*>(psi + (base ^ f.mask));
          for (std::size_t i = 0; i < 2 * block; ++i) hd[i] += w * src[i];
        } else if (f.bit_b < block_bits_) {
          const std::size_t m = f.mask;
          const double* od = reinterpret_cast<const double*>(own);
          const double dw = f.differ - f.same;
          for (std::size_t i = 0; i < block; ++i) {
            const double w = f.same + dw * static_cast<double>(((i >> f.bit_a) ^ (i >> f.bit_b)) & 1U);
            const std::size_t j = i ^ m;
            hd[2 * i] += w * od[2 * j];
            hd[2 * i + 1] += w * od[2 * j + 1];
          }
        } else {
          const std::size_t high_bit = (base >> f.bit_b) & 1U;
          const std::size_t low = std::size_t{1} << f.bit_a;
          const double* src =
              reinterpret_cast<const double*>(psi + (base ^ (std::size_t{1} << f.bit_b)));
          const double dw = f.differ - f.same;
          for (std::size_t i = 0; i < block; ++i) {
            const double w = f.same + dw * static_cast<double>(((i >> f.bit_a) & 1U) ^ high_bit);
            const std::size_t j = i ^ low;
            hd[2 * i] += w * src[2 * j];
            hd[2 * i + 1] += w * src[2 * j + 1];
          }
        }
      }
      sink(base, std::span<const Amplitude>(h.data(), block));
    }
  }
}

void SpinOperator::apply(std::span<const Amplitude> in, std::span<Amplitude> out) const {
  check_size(in, dim(), "SpinOperator::apply");
  check_size(out, dim(), "SpinOperator::apply");
  if (in.data() == out.data()) throw std::invalid_argument("SpinOperator::apply: in-place call");
  sweep(in, [&](std::size_t base, std::span<const Amplitude> h) {
    std::copy(h.begin(), h.end(), out.begin() + static_cast<std::ptrdiff_t>(base));
  });
}

void SpinOperator::recurrence_step(std::span<const Amplitude> cur, std::span<Amplitude> prev,
                                   double scale, Amplitude coef,
                                   std::span<Amplitude> acc) const {
  check_size(cur, dim(), "SpinOperator::recurrence_step");
  check_size(prev, dim(), "SpinOperator::recurrence_step");
  check_size(acc, dim(), "SpinOperator::recurrence_step");
  const double two_scale = 2.0 * scale;
  sweep(cur, [&](std::size_t base, std::span<const Amplitude> h) {
    Amplitude* p = prev.data() + base;
    Amplitude* a = acc.data() + base;
    const double cr = coef.real(), ci = coef.imag();
    for (std::size_t i = 0; i < h.size(); ++i) {
      const double nr = two_scale * h[i].real() - p[i].real();
      const double ni = two_scale * h[i].imag() - p[i].imag();
      p[i] = {nr, ni};
      a[i] += Amplitude{cr * nr - ci * ni, cr * ni + ci * nr};
    }
  });
}

void SpinOperator::first_step(std::span<const Amplitude> in, std::span<Amplitude> first,
                              double scale, Amplitude c0, Amplitude c1,
                              std::span<Amplitude> acc) const {
  check_size(in, dim(), "SpinOperator::first_step");
  check_size(first, dim(), "SpinOperator::first_step");
  check_size(acc, dim(), "SpinOperator::first_step");
  sweep(in, [&](std::size_t base, std::span<const Amplitude> h) {
    const Amplitude* x = in.data() + base;
    Amplitude* f = first.data() + base;
    Amplitude* a = acc.data() + base;
    for (std::size_t i = 0; i < h.size(); ++i) {
      const Amplitude fi = scale * h[i];
      f[i] = fi;
      a[i] = Amplitude{c0.real() * x[i].real() - c0.imag() * x[i].imag() +
                           c1.real() * fi.real() - c1.imag() * fi.imag(),
                       c0.real() * x[i].imag() + c0.imag() * x[i].real() +
                           c1.real() * fi.imag() + c1.imag() * fi.real()};
    }
  });
}

std::vector<Amplitude> apply_hamiltonian(const ModelSpec& spec, const StateVector& psi) {
  if (psi.n_qubits() != spec.n_sites())
    throw std::invalid_argument("apply_hamiltonian: state has " + std::to_string(psi.n_qubits()) +
                                " qubits, model has " + std::to_string(spec.n_sites()));
  const SpinOperator op(spec);
  std::vector<Amplitude> out(psi.dim());
  op.apply(psi.amplitudes(), out);
  return out;
}

double energy(const SpinOperator& op, const StateVector& psi) {
  std::vector<Amplitude> h(psi.dim());
  op.apply(psi.amplitudes(), h);
  return inner_product(psi.amplitudes(), h).real();
}

ChebyshevPlan make_plan_for_radius(int n_sites, double radius, double tau, double epsilon) {
  if (!(tau > 0.0)) throw std::invalid_argument("make_plan: tau must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("make_plan: epsilon must lie in (0, 1)");
  if (!(radius >= 0.0)) throw std::invalid_argument("make_plan: negative radius");

  ChebyshevPlan plan;
  plan.n_sites = n_sites;
  plan.radius = radius;
  plan.tau = tau;
  plan.epsilon = epsilon;

  const double x = radius * tau;
  if (x == 0.0) {
    plan.term_count = 0;
    plan.coefficients = {Amplitude{1.0, 0.0}};
    return plan;
  }
  const int first = static_cast<int>(std::ceil(x));
  const int last = first + 20 + static_cast<int>(std::ceil(20.0 * std::cbrt(x)));
  const std::vector<double> j = bessel_j_sequence(x, last);

  // Smallest K >= ceil(x) with |J_k| < epsilon for every k in [K, last].
  int k_trunc = -1;
  for (int k = last; k >= first; --k) {
    if (std::abs(j[static_cast<std::size_t>(k)]) >= epsilon) break;
    k_trunc = k;
  }
  if (k_trunc < 0)
    throw std::runtime_error("make_plan: Bessel tail did not fall below epsilon");

  plan.term_count = k_trunc;
  plan.coefficients.resize(static_cast<std::size_t>(k_trunc) + 1);
  static constexpr Amplitude kPhases[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};  // (-i)^k
  for (int k = 0; k <= k_trunc; ++k)
    plan.coefficients[static_cast<std::size_t>(k)] =
        kPhases[k % 4] * j[static_cast<std::size_t>(k)];
  return plan;
}

ChebyshevPlan make_plan(const ModelSpec& spec, double tau, double epsilon) {
  return make_plan_for_radius(spec.n_sites(), spectral_bound(spec), tau, epsilon);
}

ChebyshevStepper::ChebyshevStepper(const ModelSpec& spec, ChebyshevPlan plan)
    : op_(spec), plan_(std::move(plan)) {
  if (plan_.n_sites != spec.n_sites() || plan_.radius != spectral_bound(spec))
    throw std::invalid_argument("ChebyshevStepper: plan was built for a different model");
  if (plan_.term_count >= 1) {
    prev_.resize(op_.dim());
    cur_.resize(op_.dim());
  }
}

void ChebyshevStepper::step(StateVector& psi) {
  if (psi.n_qubits() != op_.n_sites())
    throw std::invalid_argument("ChebyshevStepper::step: state/model size mismatch");
  const auto& c = plan_.coefficients;
  std::span<Amplitude> acc = psi.amplitudes();
  if (plan_.term_count == 0) {
    for (Amplitude& a : acc) a *= c[0];
    return;
  }
  const double scale = 1.0 / plan_.radius;
  std::copy(acc.begin(), acc.end(), prev_.begin());
  op_.first_step(prev_, cur_, scale, c[0], 2.0 * c[1], acc);
  for (int k = 2; k <= plan_.term_count; ++k) {
    op_.recurrence_step(cur_, prev_, scale, 2.0 * c[static_cast<std::size_t>(k)], acc);
    std::swap(prev_, cur_);
  }
}

StateVector chebyshev_step(const ModelSpec& spec, const ChebyshevPlan& plan,
                           const StateVector& psi) {
  ChebyshevStepper stepper(spec, plan);
  StateVector out = psi;
  stepper.step(out);
  return out;
}

ComplexMatrix dense_hamiltonian(int n_sites, std::span<const Bond> bonds) {
  if (n_sites < 1 || n_sites > kMaxDenseSites)
    throw std::length_error("dense_hamiltonian: " + std::to_string(n_sites) +
                            " sites outside [1, " + std::to_string(kMaxDenseSites) + "]");
  const Amplitude i_unit{0.0, 1.0};
  ComplexMatrix half_x(2), half_y(2), half_z(2);
  half_x(0, 1) = half_x(1, 0) = 0.5;
  half_y(0, 1) = -0.5 * i_unit;
  half_y(1, 0) = 0.5 * i_unit;
  half_z(0, 0) = 0.5;
  half_z(1, 1) = -0.5;
  const ComplexMatrix id2 = ComplexMatrix::identity(2);

  // Site s is bit s of the basis index, so the leftmost Kronecker factor is
  // the highest site.
  auto two_site = [&](const ComplexMatrix& op, int a, int b) {
    ComplexMatrix m = (n_sites - 1 == a || n_sites - 1 == b) ? op : id2;
    for (int s = n_sites - 2; s >= 0; --s) m = kron(m, (s == a || s == b) ? op : id2);
    return m;
  };

  const std::size_t dim = std::size_t{1} << n_sites;
  ComplexMatrix h(dim);
  for (const Bond& bond : bonds) {
    if (bond.site_a < 0 || bond.site_b >= n_sites || bond.site_a >= bond.site_b)
      throw std::invalid_argument("dense_hamiltonian: bad bond");
    const std::pair<const ComplexMatrix*, double> axes[3] = {
        {&half_x, bond.strength.x}, {&half_y, bond.strength.y}, {&half_z, bond.strength.z}};
    for (const auto& [op, strength] : axes) {
      if (strength == 0.0) continue;
      const ComplexMatrix term = two_site(*op, bond.site_a, bond.site_b);
      auto hd = h.data();
      auto td = term.data();
      for (std::size_t k = 0; k < hd.size(); ++k) hd[k] -= strength * td[k];
    }
  }
  return h;
}

ComplexMatrix dense_hamiltonian(const ModelSpec& spec) {
  return dense_hamiltonian(spec.n_sites(), spec.bonds);
}

ComplexMatrix system_hamiltonian(const ModelSpec& spec) {
  std::vector<Bond> system_bonds;
  for (const Bond& bond : spec.bonds)
    if (sector_of(bond, spec.n_system) == Sector::system) system_bonds.push_back(bond);
  return dense_hamiltonian(spec.n_system, system_bonds);
}

StateVector dense_evolve_oracle(const ModelSpec& spec, const StateVector& psi, double t) {
  if (spec.n_sites() > kMaxDenseSites)
    throw std::length_error("dense_evolve_oracle: too many sites");
  if (psi.n_qubits() != spec.n_sites())
    throw std::invalid_argument("dense_evolve_oracle: state/model size mismatch");
  const SystemEigenbasis eig = hermitian_eigendecomposition(dense_hamiltonian(spec));
  const std::size_t dim = psi.dim();
  const ComplexMatrix& v = eig.vectors;

  std::vector<Amplitude> coeff(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    Amplitude acc{};
    for (std::size_t n = 0; n < dim; ++n) acc += std::conj(v(n, k)) * psi[n];
    coeff[k] = acc * std::exp(Amplitude{0.0, -t * eig.energies[k]});
  }
  StateVector out(psi.n_qubits());
  for (std::size_t n = 0; n < dim; ++n) {
    Amplitude acc{};
    for (std::size_t k = 0; k < dim; ++k) acc += v(n, k) * coeff[k];
    out[n] = acc;
  }
  return out;
}

}  // namespace decoh
