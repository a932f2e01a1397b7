#pragma once

#include <vector>

namespace decoh {

/// J_0(x) .. J_max_order(x), Bessel functions of the first kind, by Miller's
/// downward recurrence normalized with J_0 + 2 * sum_k J_2k = 1.
std::vector<double> bessel_j_sequence(double x, int max_order);

}  // namespace decoh
