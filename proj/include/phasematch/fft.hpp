#pragma once

#include <complex>
#include <vector>

namespace phasematch {

using cd = std::complex<double>;

// In-place forward/inverse FFT of arbitrary length (radix-2 for powers of
// two, Bluestein otherwise). The inverse includes the 1/N factor.
void fft(std::vector<cd>& data, bool inverse);

// Row-major 2-D transform; rows and columns run in parallel across
// thread_count() workers. Each 1-D transform touches only its own row or
// column, so the result is identical for any worker count.
void fft_2d(std::vector<cd>& data, int width, int height, bool inverse);

namespace reference {

// O(n^2) direct evaluation of the DFT sum. Serial oracle for the FFT.
std::vector<cd> naive_dft(const std::vector<cd>& data, bool inverse);

} // namespace reference

} // namespace phasematch
