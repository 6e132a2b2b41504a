#pragma once

#include <complex>
#include <span>

namespace superband::fft {

using Complex = std::complex<double>;

/// Unnormalized out-of-place DFT, out[k] = sum_j in[j] exp(-2 pi i j k / n).
void forward(std::span<const Complex> in, std::span<Complex> out);

/// Unnormalized out-of-place inverse DFT, out[j] = sum_k in[k] exp(+2 pi i j k / n).
void backward(std::span<const Complex> in, std::span<Complex> out);

} // namespace superband::fft
