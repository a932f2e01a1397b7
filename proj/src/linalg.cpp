#include "decoh/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "decoh/parallel.hpp"

namespace decoh {

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  if (other.dim_ != dim_) throw std::invalid_argument("matrix dimension mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("matrix dimension mismatch");
  const std::size_t n = a.dim();
  ComplexMatrix out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const Amplitude aik = a(i, k);
      if (aik == Amplitude{}) continue;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("matrix dimension mismatch");
  ComplexMatrix out = a;
  auto o = out.data();
  auto d = b.data();
  for (std::size_t k = 0; k < o.size(); ++k) o[k] -= d[k];
  return out;
}

std::vector<Amplitude> multiply(const ComplexMatrix& m, std::span<const Amplitude> v) {
  if (v.size() != m.dim()) throw std::invalid_argument("matrix-vector dimension mismatch");
  std::vector<Amplitude> out(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i) {
    Amplitude acc{};
    for (std::size_t j = 0; j < m.dim(); ++j) acc += m(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t na = a.dim(), nb = b.dim();
  ComplexMatrix out(na * nb);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < na; ++j) {
      const Amplitude aij = a(i, j);
      if (aij == Amplitude{}) continue;
      for (std::size_t k = 0; k < nb; ++k)
        for (std::size_t l = 0; l < nb; ++l) out(i * nb + k, j * nb + l) = aij * b(k, l);
    }
  return out;
}

double frobenius_norm(const ComplexMatrix& m) {
  double s = 0.0;
  for (const Amplitude& x : m.data()) s += std::norm(x);
  return std::sqrt(s);
}

double hermiticity_error(const ComplexMatrix& m) {
  double worst = 0.0;
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = i; j < m.dim(); ++j)
      worst = std::max(worst, std::abs(m(i, j) - std::conj(m(j, i))));
  return worst;
}

Amplitude trace(const ComplexMatrix& m) {
  Amplitude t{};
  for (std::size_t i = 0; i < m.dim(); ++i) t += m(i, i);
  return t;
}

Amplitude inner_product(std::span<const Amplitude> bra, std::span<const Amplitude> ket) {
  if (bra.size() != ket.size()) throw std::invalid_argument("inner_product: size mismatch");
  return ordered_chunk_sum(bra.size(), kReductionChunk, Amplitude{},
                           [&](std::size_t b, std::size_t e) {
                             Amplitude acc{};
                             for (std::size_t k = b; k < e; ++k)
                               acc += std::conj(bra[k]) * ket[k];
                             return acc;
                           });
}

double norm2(std::span<const Amplitude> v) {
  const double s = ordered_chunk_sum(v.size(), kReductionChunk, 0.0,
                                     [&](std::size_t b, std::size_t e) {
                                       double acc = 0.0;
                                       for (std::size_t k = b; k < e; ++k) acc += std::norm(v[k]);
                                       return acc;
                                     });
  return std::sqrt(s);
}

double distance(std::span<const Amplitude> a, std::span<const Amplitude> b) {
  if (a.size() != b.size()) throw std::invalid_argument("distance: size mismatch");
  const double s = ordered_chunk_sum(a.size(), kReductionChunk, 0.0,
                                     [&](std::size_t lo, std::size_t hi) {
                                       double acc = 0.0;
                                       for (std::size_t k = lo; k < hi; ++k)
                                         acc += std::norm(a[k] - b[k]);
                                       return acc;
                                     });
  return std::sqrt(s);
}

}  // namespace decoh
