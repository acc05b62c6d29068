#pragma once

#include <vector>

#include "limitnls/types.hpp"

namespace limitnls {

// Forward: out[m] = (1/M) sum_i in[i] exp(-2*pi*i*m*i/M).
// Inverse: out[i] =       sum_m in[m] exp(+2*pi*i*m*i/M).
// Any size M >= 1.  Plans are cached per (size, direction); results are
// independent of caller threading.
std::vector<Complex> dft_forward(const std::vector<Complex>& in);
std::vector<Complex> dft_inverse(const std::vector<Complex>& in);

}  // namespace limitnls
