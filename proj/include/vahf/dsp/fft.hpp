#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace vahf::dsp {

std::size_t next_pow2(std::size_t n);

/// In-place iterative radix-2 FFT; size must be a power of two.
void fft_inplace(std::span<std::complex<double>> x, bool inverse = false);

/// Magnitudes of the non-negative-frequency half (n/2 + 1 bins) of the DFT of
/// `x` zero-padded to `nfft` (a power of two, >= x.size()).
std::vector<double> rfft_magnitude(std::span<const double> x, std::size_t nfft);

/// Periodic Hann window.
std::vector<double> hann_window(std::size_t n);

}  // namespace vahf::dsp
