#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace gmsim {

std::size_t next_pow2(std::size_t n);

/// Iterative radix-2 transform. Length must be a power of two. The inverse
/// includes the 1/N factor. Fully deterministic: identical inputs give
/// bitwise-identical outputs regardless of threading.
void fft_inplace(std::vector<std::complex<double>>& a, bool inverse);

/// Forward transform of a real signal zero-padded to length n (power of two).
std::vector<std::complex<double>> fft_real(std::span<const double> x,
                                           std::size_t n);

}  // namespace gmsim
