#pragma once

// Thin wrappers over FFTW. Planning is serialized behind a mutex and plans
// are cached per size; execution uses the new-array interface so concurrent
// callers never share buffers.

#include <span>
#include <vector>

namespace seabed::fft {

/// Type-I discrete cosine transform (FFTW REDFT00), unnormalized:
/// out[k] = in[0] + (-1)^k in[n-1] + 2 sum_{j=1}^{n-2} in[j] cos(pi j k / (n-1)).
std::vector<double> dct1(std::span<const double> in);

/// Circular convolution of two equal-length real sequences,
/// (a * b)[m] = sum_k a[k] b[(m - k) mod n].
std::vector<double> circular_convolve(std::span<const double> a,
                                      std::span<const double> b);

/// Biased autocovariance sum_{t} (x_t - mean)(x_{t+k} - mean) / n for k < n,
/// computed with zero padding to avoid wrap-around.
std::vector<double> autocovariance(std::span<const double> x);

}  // namespace seabed::fft
