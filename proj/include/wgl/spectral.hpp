#pragma once

// Transform plumbing: FFTW-backed real transforms with the e(+n alpha) sign
// convention, and exact self-convolution powers of 0/1 sequences.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "wgl/arith.hpp"

namespace wgl {

/// Smallest 2^a 3^b 5^c 7^d >= n.
std::size_t smooth_size(std::size_t n);

/// Entries j = 0..G/2 of sum_i signal[i] e(i j / G), zero-padded to G.
/// Requires signal.size() <= G.
std::vector<std::complex<double>> forward_half_spectrum(const std::vector<double>& signal, std::size_t G);

/// Inverse of forward_half_spectrum: recovers the length-G real signal.
std::vector<double> inverse_half_spectrum(const std::vector<std::complex<double>>& half, std::size_t G);

struct ConvolutionPower {
  std::vector<u64> counts;  // entries out_lo..out_hi of the s-fold power
  bool exact_fallback = false;
  double max_residual = 0;  // distance of the floating result from integers
};

/// The s-fold self-convolution of a 0/1 sequence, restricted to indices
/// [out_lo, out_hi]. Floating FFT first; the result is accepted only when
/// every value sits within 0.25 of an integer and the total mass equals
/// (sum)^s, otherwise an exact number-theoretic transform is used.
ConvolutionPower self_convolution_power(const std::vector<std::uint8_t>& indicator, int s,
                                        std::size_t out_lo, std::size_t out_hi,
                                        u64 memory_budget = u64{4} << 30);

/// Same computation, always through the exact transform mod 2^64 - 2^32 + 1.
/// Valid while every count is below that prime.
std::vector<u64> exact_convolution_power(const std::vector<std::uint8_t>& indicator, int s,
                                         std::size_t out_lo, std::size_t out_hi,
                                         u64 memory_budget = u64{4} << 30);

}  // namespace wgl
