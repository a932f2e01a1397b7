#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace decoh {

using Amplitude = std::complex<double>;

/// Dense square complex matrix, row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

  static ComplexMatrix identity(std::size_t dim);

  std::size_t dim() const { return dim_; }

  Amplitude& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
  const Amplitude& operator()(std::size_t i, std::size_t j) const {
    return data_[i * dim_ + j];
  }

  std::span<Amplitude> data() { return data_; }
  std::span<const Amplitude> data() const { return data_; }

  ComplexMatrix adjoint() const;
  ComplexMatrix& operator+=(const ComplexMatrix& other);

  bool operator==(const ComplexMatrix&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<Amplitude> data_;
};

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);

std::vector<Amplitude> multiply(const ComplexMatrix& m, std::span<const Amplitude> v);

/// Kronecker product a ⊗ b.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

double frobenius_norm(const ComplexMatrix& m);

/// Largest |m(i,j) - conj(m(j,i))|.
double hermiticity_error(const ComplexMatrix& m);

Amplitude trace(const ComplexMatrix& m);

// Reductions over amplitude arrays use fixed chunking (see parallel.hpp).
Amplitude inner_product(std::span<const Amplitude> bra, std::span<const Amplitude> ket);
double norm2(std::span<const Amplitude> v);
double distance(std::span<const Amplitude> a, std::span<const Amplitude> b);

}  // namespace decoh
