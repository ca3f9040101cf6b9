#pragma once

#include <complex>
#include <span>

namespace resplab {

// In-place iterative radix-2 DFT, X[k] = sum_n x[n] exp(-2*pi*i*k*n/N).
// Size must be a power of two.
void fft_inplace(std::span<std::complex<double>> data);

constexpr bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace resplab
