#pragma once

#include <vector>

#include "pslab/types.hpp"

namespace pslab {

// In-place radix-2 FFT; n must be a power of two. sign = -1 forward, +1 inverse
// (inverse is unnormalized; divide by n yourself).
void fft_pow2(std::vector<cplx>& a, int sign);

bool is_pow2(std::size_t n);

}  // namespace pslab
