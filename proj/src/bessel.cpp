#include "decoh/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace decoh {

namespace {

// Below this argument the leading power-series term is exact in double.
constexpr double kSeriesCutoff = 1e-8;
constexpr double kRescaleAbove = 1e250;

}  // namespace

std::vector<double> bessel_j_sequence(double x, int max_order) {
  if (max_order < 0) throw std::invalid_argument("bessel_j_sequence: negative order");
  std::vector<double> j(static_cast<std::size_t>(max_order) + 1, 0.0);
  if (!std::isfinite(x)) throw std::invalid_argument("bessel_j_sequence: non-finite argument");

  const double ax = std::abs(x);
  if (ax < kSeriesCutoff) {
    // J_k(x) ~ (x/2)^k / k!, relative error below x^2 / 4.
    double term = 1.0;
    for (int k = 0; k <= max_order; ++k) {
      j[static_cast<std::size_t>(k)] = term;
      term *= (ax / 2.0) / (k + 1);
      if (term == 0.0) break;
    }
    j[0] = 1.0 - ax * ax / 4.0;
  } else {
    const int top = std::max(max_order, static_cast<int>(std::ceil(ax)));
    int start = top + 30 + static_cast<int>(std::sqrt(200.0 * top));
    start += start % 2;

    double next = 0.0;   // J_{k+1}
    double cur = 1e-300; // J_k, arbitrary scale
    double even_sum = 0.0;
    for (int k = start; k >= 1; --k) {
      const double prev = (2.0 * k / ax) * cur - next;  // J_{k-1}
      next = cur;
      cur = prev;
      const int order = k - 1;
      if (order <= max_order) j[static_cast<std::size_t>(order)] = cur;
      if (order > 0 && order % 2 == 0) even_sum += cur;
      if (std::abs(cur) > kRescaleAbove) {
        cur /= kRescaleAbove;
        next /= kRescaleAbove;
        even_sum /= kRescaleAbove;
        for (int m = order; m <= max_order; ++m) j[static_cast<std::size_t>(m)] /= kRescaleAbove;
      }
    }
    const double norm = cur + 2.0 * even_sum;
    for (double& v : j) v /= norm;
  }

  if (x < 0.0)
    for (std::size_t k = 1; k < j.size(); k += 2) j[k] = -j[k];
  return j;
}

}  // namespace decoh
