#pragma once

#include <complex>
#include <vector>

namespace accentkit {

// In-place iterative radix-2 FFT; size must be a power of two.
void fft(std::vector<std::complex<double>>& a);

// Periodic Hann window of length n.
std::vector<double> hann_window(int n);

// Triangular mel filterbank, n_mels x (n_fft/2 + 1), HTK mel scale.
std::vector<std::vector<double>> mel_filterbank(int n_mels, int n_fft,
                                                double sample_rate, double fmin,
                                                double fmax);

}  // namespace accentkit
