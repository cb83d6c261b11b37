#pragma once

// Thin FFTW wrapper. Unnormalized multi-dimensional complex DFTs on
// row-major arrays of n^d points; sign -1 for forward, +1 for backward.

#include <complex>
#include <span>

namespace schwinger::detail {

void dft_forward(int dim, int n, std::span<const std::complex<double>> in,
                 std::span<std::complex<double>> out);
void dft_backward(int dim, int n, std::span<const std::complex<double>> in,
                  std::span<std::complex<double>> out);

}  // namespace schwinger::detail
