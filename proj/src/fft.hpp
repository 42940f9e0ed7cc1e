#pragma once

#include <complex>
#include <vector>

namespace bcg::detail {

/// In-place complex DFT of size n (any n >= 1), forward (sign -1) or
/// inverse (sign +1). The inverse is unnormalized; callers divide by n.
/// Thread-safe: planning is serialized internally, execution is concurrent.
void fft(std::vector<std::complex<double>>& data, int sign);

/// Linear cross-correlation y[m] = sum_j x[m + j] * g[j], m in [0, nx - ng],
/// computed via FFT. Requires nx >= ng.
std::vector<std::complex<double>> correlate_valid(const std::vector<double>& x,
                                                  const std::vector<std::complex<double>>& g);

}  // namespace bcg::detail
