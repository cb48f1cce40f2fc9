#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace ultragest {

/// In-place iterative radix-2 FFT. Size must be a power of two. The inverse
/// transform includes the 1/N scaling.
void fft_inplace(std::vector<std::complex<double>>& data, bool inverse);

std::size_t next_pow2(std::size_t n);

}  // namespace ultragest
